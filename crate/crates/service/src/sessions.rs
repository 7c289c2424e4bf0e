//! Live search sessions keyed by opaque ids, with idle expiry.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;

use atlas_core::{SearchAlgo, SearchSession, SessionStatus, StateId};

pub struct Entry {
    pub session: SearchSession,
    last_used: Instant,
}

impl Entry {
    pub fn handle(&self, id: &str) -> SessionHandle {
        SessionHandle {
            session_id: id.to_owned(),
            algo: self.session.algo(),
            start: self.session.start(),
            goal: self.session.goal(),
            status: self.session.status(),
            steps_emitted: self.session.steps_emitted(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SessionHandle {
    pub session_id: String,
    pub algo: SearchAlgo,
    pub start: StateId,
    pub goal: StateId,
    pub status: SessionStatus,
    pub steps_emitted: u64,
}

pub struct SessionStore {
    ttl: Duration,
    entries: Mutex<HashMap<String, Arc<Mutex<Entry>>>>,
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore { ttl, entries: Mutex::new(HashMap::new()) }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn insert(&self, session: SearchSession) -> (String, Arc<Mutex<Entry>>) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let entry = Arc::new(Mutex::new(Entry { session, last_used: Instant::now() }));
        self.entries.lock().unwrap().insert(id.clone(), entry.clone());
        (id, entry)
    }

    /// Looks up a session and refreshes its idle clock. Expired sessions are
    /// dropped here as well as by [`SessionStore::expire_idle`].
    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Entry>>> {
        let mut entries = self.entries.lock().unwrap();
        let entry = entries.get(id)?.clone();
        let mut guard = match entry.try_lock() {
            Ok(guard) => guard,
            // busy with a step on another request, so not idle
            Err(_) => return Some(entry.clone()),
        };
        if guard.last_used.elapsed() > self.ttl {
            drop(guard);
            entries.remove(id);
            return None;
        }
        guard.last_used = Instant::now();
        drop(guard);
        Some(entry)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.entries.lock().unwrap().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops sessions idle for longer than the ttl. Returns how many were dropped.
    pub fn expire_idle(&self) -> usize {
        let mut entries = self.entries.lock().unwrap();
        let before = entries.len();
        entries.retain(|_, e| match e.try_lock() {
            Ok(e) => e.last_used.elapsed() <= self.ttl,
            Err(_) => true,
        });
        before - entries.len()
    }
}
