//! Binary graph (`8PSS`) and position (`8PLY`) files.
//!
//! Both are little-endian and end with a CRC-32 of every preceding byte.
//!
//! ```text
//! 8PSS: magic "8PSS" | version u16 = 1 | reserved u16 = 0 | node_count u32
//!       | directed_entry_count u32 | goal_id u32
//!       | offsets (node_count + 1) x u32 | neighbors directed_entry_count x u32 | crc32 u32
//! 8PLY: magic "8PLY" | version u16 = 1 | kind u8 | reserved u8 | node_count u32 | seed u64
//!       | node_count x 3 x f32 | crc32 u32
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::StateGraph;
use crate::layout::{LayoutKind, LayoutResult, Position};
use crate::puzzle::StateId;

pub const GRAPH_MAGIC: &[u8; 4] = b"8PSS";
pub const POSITIONS_MAGIC: &[u8; 4] = b"8PLY";
pub const FORMAT_VERSION: u16 = 1;

pub const GRAPH_HEADER_LEN: usize = 20;
pub const POSITIONS_HEADER_LEN: usize = 20;
pub const TRAILER_LEN: usize = 4;

fn seal(mut buf: Vec<u8>) -> Vec<u8> {
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

/// Checks magic, version and trailer; returns the payload without the trailer.
fn open<'a>(bytes: &'a [u8], magic: &'static [u8; 4], header_len: usize) -> Result<&'a [u8]> {
    let expected = std::str::from_utf8(magic).expect("ascii magic");
    if bytes.len() < magic.len() {
        return Err(Error::BadChecksum);
    }
    if &bytes[..4] != magic {
        return Err(Error::BadMagic { expected });
    }
    if bytes.len() < header_len + TRAILER_LEN {
        return Err(Error::BadChecksum);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { found: version, expected: FORMAT_VERSION });
    }
    let (payload, trailer) = bytes.split_at(bytes.len() - TRAILER_LEN);
    let stored = u32::from_le_bytes(trailer.try_into().expect("four bytes"));
    if crc32fast::hash(payload) != stored {
        return Err(Error::BadChecksum);
    }
    Ok(payload)
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        if self.bytes.len() < N {
            return Err(Error::Malformed("unexpected end of payload".into()));
        }
        let (head, rest) = self.bytes.split_at(N);
        self.bytes = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        self.take().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.take().map(u64::from_le_bytes)
    }

    fn f32(&mut self) -> Result<f32> {
        self.take().map(f32::from_le_bytes)
    }
}

pub fn encode_graph(g: &StateGraph) -> Vec<u8> {
    let mut buf = Vec::with_capacity(
        GRAPH_HEADER_LEN + 4 * (g.offsets().len() + g.neighbor_entries().len()) + TRAILER_LEN,
    );
    buf.extend_from_slice(GRAPH_MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&0u16.to_le_bytes());
    buf.extend_from_slice(&g.node_count().to_le_bytes());
    buf.extend_from_slice(&g.directed_entry_count().to_le_bytes());
    buf.extend_from_slice(&g.goal_id().0.to_le_bytes());
    for &o in g.offsets() {
        buf.extend_from_slice(&o.to_le_bytes());
    }
    for v in g.neighbor_entries() {
        buf.extend_from_slice(&v.0.to_le_bytes());
    }
    seal(buf)
}

pub fn decode_graph(bytes: &[u8]) -> Result<StateGraph> {
    let payload = open(bytes, GRAPH_MAGIC, GRAPH_HEADER_LEN)?;
    let mut r = Reader { bytes: &payload[6..] };
    let _reserved = r.u16()?;
    let node_count = r.u32()? as usize;
    let entries = r.u32()? as usize;
    let goal_id = StateId(r.u32()?);
    let expected = GRAPH_HEADER_LEN + 4 * (node_count + 1 + entries);
    if payload.len() != expected {
        return Err(Error::Malformed(format!("payload is {} bytes, header implies {expected}", payload.len())));
    }
    let offsets = (0..=node_count).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let neighbors = (0..entries).map(|_| r.u32().map(StateId)).collect::<Result<Vec<_>>>()?;
    StateGraph::from_parts(offsets, neighbors, goal_id)
}

pub fn save_graph(g: &StateGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_graph(g))?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<StateGraph> {
    decode_graph(&fs::read(path)?)
}

/// Decoded contents of a position file.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionBuffer {
    pub kind: LayoutKind,
    pub seed: u64,
    pub positions: Vec<Position>,
}

impl From<&LayoutResult> for PositionBuffer {
    fn from(layout: &LayoutResult) -> Self {
        PositionBuffer { kind: layout.kind, seed: layout.file_seed(), positions: layout.positions.clone() }
    }
}

pub fn positions_file_len(node_count: usize) -> usize {
    POSITIONS_HEADER_LEN + 12 * node_count + TRAILER_LEN
}

pub fn encode_positions(kind: LayoutKind, seed: u64, positions: &[Position]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(positions_file_len(positions.len()));
    buf.extend_from_slice(POSITIONS_MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.push(kind.code());
    buf.push(0);
    buf.extend_from_slice(&(positions.len() as u32).to_le_bytes());
    buf.extend_from_slice(&seed.to_le_bytes());
    for p in positions {
        for c in p {
            buf.extend_from_slice(&c.to_le_bytes());
        }
    }
    seal(buf)
}

pub fn encode_layout(layout: &LayoutResult) -> Vec<u8> {
    encode_positions(layout.kind, layout.file_seed(), &layout.positions)
}

pub fn decode_positions(bytes: &[u8]) -> Result<PositionBuffer> {
    let payload = open(bytes, POSITIONS_MAGIC, POSITIONS_HEADER_LEN)?;
    let mut r = Reader { bytes: &payload[4..] };
    let _version = r.u16()?;
    let code = r.u8()?;
    let kind = LayoutKind::from_code(code).ok_or_else(|| Error::Malformed(format!("unknown layout kind {code}")))?;
    let _reserved = r.u8()?;
    let node_count = r.u32()? as usize;
    let seed = r.u64()?;
    if payload.len() + TRAILER_LEN != positions_file_len(node_count) {
        return Err(Error::Malformed(format!("payload length does not match {node_count} positions")));
    }
    let positions = (0..node_count)
        .map(|_| Ok([r.f32()?, r.f32()?, r.f32()?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PositionBuffer { kind, seed, positions })
}

pub fn save_positions(layout: &LayoutResult, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_layout(layout))?;
    Ok(())
}

pub fn load_positions(path: impl AsRef<Path>) -> Result<PositionBuffer> {
    decode_positions(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> StateGraph {
        StateGraph::from_parts(vec![0, 1, 3, 4], [1, 0, 2, 1].map(StateId).to_vec(), StateId(2)).unwrap()
    }

    #[test]
    fn graph_header_layout() {
        let bytes = encode_graph(&tiny());
        assert_eq!(&bytes[..4], b"8PSS");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(&bytes[6..8], &[0, 0]);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 2);
        assert_eq!(bytes.len(), GRAPH_HEADER_LEN + 4 * (4 + 4) + TRAILER_LEN);
        assert_eq!(decode_graph(&bytes).unwrap(), tiny());
    }

    #[test]
    fn corrupt_graph_files() {
        let bytes = encode_graph(&tiny());
        assert!(matches!(decode_graph(&bytes[..bytes.len() - 1]), Err(Error::BadChecksum)));
        assert!(matches!(decode_graph(&bytes[..10]), Err(Error::BadChecksum)));
        assert!(matches!(decode_graph(&bytes[..2]), Err(Error::BadChecksum)));

        let mut flipped = bytes.clone();
        flipped[25] ^= 0x40;
        assert!(matches!(decode_graph(&flipped), Err(Error::BadChecksum)));

        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(decode_graph(&magic), Err(Error::BadMagic { .. })));

        let mut version = bytes[..bytes.len() - 4].to_vec();
        version[4] = 2;
        let version = seal(version);
        assert!(matches!(decode_graph(&version), Err(Error::VersionMismatch { found: 2, .. })));

        // a positions file is foreign to the graph loader
        let ply = encode_positions(LayoutKind::Depth, 0, &[[0.0; 3]]);
        assert!(matches!(decode_graph(&ply), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn inconsistent_header_with_valid_crc() {
        let mut bytes = encode_graph(&tiny());
        bytes.truncate(bytes.len() - 4);
        bytes[12] = 9;
        let bytes = seal(bytes);
        assert!(matches!(decode_graph(&bytes), Err(Error::Malformed(_))));
    }

    #[test]
    fn positions_round_trip() {
        let pos = vec![[1.0, -2.5, 3.25], [f32::MIN_POSITIVE, 0.0, -0.0]];
        let bytes = encode_positions(LayoutKind::Force, 0xDEAD_BEEF_0000_0001, &pos);
        assert_eq!(bytes.len(), positions_file_len(2));
        assert_eq!(bytes[6], 0);
        let back = decode_positions(&bytes).unwrap();
        assert_eq!(back.kind, LayoutKind::Force);
        assert_eq!(back.seed, 0xDEAD_BEEF_0000_0001);
        assert_eq!(encode_positions(back.kind, back.seed, &back.positions), bytes);
    }

    #[test]
    fn corrupt_positions_files() {
        let bytes = encode_positions(LayoutKind::Heuristic, 0, &[[1.0, 2.0, 3.0]]);
        assert!(matches!(decode_positions(&bytes[..bytes.len() - 3]), Err(Error::BadChecksum)));
        let mut magic = bytes.clone();
        magic[3] = b'S';
        assert!(matches!(decode_positions(&magic), Err(Error::BadMagic { .. })));
        let mut kind = bytes[..bytes.len() - 4].to_vec();
        kind[6] = 7;
        assert!(matches!(decode_positions(&seal(kind)), Err(Error::Malformed(_))));
    }
}
