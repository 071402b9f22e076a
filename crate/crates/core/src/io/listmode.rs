//! Binary list-mode event files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! header (19 bytes)
//!   0  magic           4 bytes  "XPDC"
//!   4  version         u16
//!   6  clock_tick_ns   u32
//!  10  detector_count  u8
//!  11  config_hash     u64     FNV-1a of the canonical run configuration
//! records (13 bytes each, until end of file)
//!   0  detector_id     u8      zero-based, < detector_count
//!   1  timestamp_ns    u64
//!   9  energy_ev       u32
//! ```
//!
//! Records of one detector are non-decreasing in time. Writers interleave the
//! detectors in global time order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::sim::{DetectorId, EventRecord};

pub const MAGIC: [u8; 4] = *b"XPDC";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 19;
pub const RECORD_LEN: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListModeHeader {
    pub version: u16,
    pub clock_tick: u32,
    pub detector_count: u8,
    pub config_hash: u64,
}

impl ListModeHeader {
    pub fn new(clock_tick: u32, config_hash: u64) -> Self {
        ListModeHeader {
            version: FORMAT_VERSION,
            clock_tick,
            detector_count: 2,
            config_hash,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListModeFile {
    pub header: ListModeHeader,
    pub records: Vec<EventRecord>,
}

impl ListModeFile {
    /// Interleaves two time-ordered detector streams into one file; detector
    /// 1 goes first on equal timestamps.
    pub fn from_streams(header: ListModeHeader, streams: &[Vec<EventRecord>; 2]) -> Self {
        let (a, b) = (&streams[0], &streams[1]);
        let mut records = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].timestamp <= b[j].timestamp);
            if take_a {
                records.push(a[i]);
                i += 1;
            } else {
                records.push(b[j]);
                j += 1;
            }
        }
        ListModeFile { header, records }
    }

    /// Per-detector streams, each in file order.
    pub fn split_streams(&self) -> [Vec<EventRecord>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for r in &self.records {
            out[r.detector.index()].push(*r);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.header.detector_count == 0 || self.header.detector_count > 2 {
            return Err(Error::Format(format!(
                "unsupported detector count {}",
                self.header.detector_count
            )));
        }
        let mut last = [0u64; 2];
        for (n, r) in self.records.iter().enumerate() {
            let d = r.detector.index();
            if d >= usize::from(self.header.detector_count) {
                return Err(Error::Format(format!(
                    "record {n}: detector id {d} out of range"
                )));
            }
            if r.timestamp < last[d] {
                return Err(Error::Format(format!(
                    "record {n}: detector {} goes back in time",
                    r.detector
                )));
            }
            if r.energy == 0 {
                return Err(Error::Format(format!("record {n}: zero energy")));
            }
            last[d] = r.timestamp;
        }
        Ok(())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(HEADER_LEN + RECORD_LEN * self.records.len());
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let h = &self.header;
        w.write_all(&MAGIC)?;
        w.write_all(&h.version.to_le_bytes())?;
        w.write_all(&h.clock_tick.to_le_bytes())?;
        w.write_all(&[h.detector_count])?;
        w.write_all(&h.config_hash.to_le_bytes())?;
        let mut rec = [0u8; RECORD_LEN];
        for r in &self.records {
            rec[0] = r.detector.index() as u8;
            rec[1..9].copy_from_slice(&r.timestamp.to_le_bytes());
            rec[9..13].copy_from_slice(&r.energy.to_le_bytes());
            w.write_all(&rec)?;
        }
        Ok(())
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!(
                "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Format(
                "bad magic, not an XPDC list-mode file".into(),
            ));
        }
        let le_u16 = |b: &[u8]| u16::from_le_bytes(b.try_into().expect("2 bytes"));
        let le_u32 = |b: &[u8]| u32::from_le_bytes(b.try_into().expect("4 bytes"));
        let le_u64 = |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8 bytes"));
        let header = ListModeHeader {
            version: le_u16(&bytes[4..6]),
            clock_tick: le_u32(&bytes[6..10]),
            detector_count: bytes[10],
            config_hash: le_u64(&bytes[11..19]),
        };
        if header.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format version {}",
                header.version
            )));
        }
        let body = &bytes[HEADER_LEN..];
        if !body.len().is_multiple_of(RECORD_LEN) {
            return Err(Error::Format(format!(
                "truncated record: {} trailing bytes",
                body.len() % RECORD_LEN
            )));
        }
        let records = body
            .chunks_exact(RECORD_LEN)
            .enumerate()
            .map(|(n, rec)| {
                let detector = DetectorId::from_index(usize::from(rec[0])).ok_or_else(|| {
                    Error::Format(format!("record {n}: unsupported detector id {}", rec[0]))
                })?;
                Ok(EventRecord {
                    detector,
                    timestamp: le_u64(&rec[1..9]),
                    energy: le_u32(&rec[9..13]),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let file = ListModeFile { header, records };
        file.validate()?;
        Ok(file)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::decode(&bytes)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::decode(&fs::read(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.encode())
    }

    /// One `detector,timestamp_ns,energy_ev` row per record, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# clock_tick_ns={}\n# config_hash={:016x}\ndetector,timestamp_ns,energy_ev\n",
            self.header.clock_tick, self.header.config_hash
        );
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.detector, r.timestamp, r.energy));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(d: DetectorId, t: u64, e: u32) -> EventRecord {
        EventRecord {
            detector: d,
            timestamp: t,
            energy: e,
        }
    }

    #[test]
    fn header_only_file() {
        let f = ListModeFile::from_streams(ListModeHeader::new(20, 0xdead_beef), &[vec![], vec![]]);
        let bytes = f.encode();
        assert_eq!(bytes.len(), HEADER_LEN);
        assert_eq!(&bytes[..4], b"XPDC");
        assert_eq!(ListModeFile::decode(&bytes).unwrap(), f);
    }

    #[test]
    fn exact_byte_layout() {
        let f = ListModeFile {
            header: ListModeHeader::new(20, 0x0102_0304_0506_0708),
            records: vec![rec(DetectorId::Two, 0x1122, 11_000)],
        };
        let b = f.encode();
        assert_eq!(b.len(), HEADER_LEN + RECORD_LEN);
        assert_eq!(&b[4..6], &[1, 0]);
        assert_eq!(&b[6..10], &[20, 0, 0, 0]);
        assert_eq!(b[10], 2);
        assert_eq!(&b[11..19], &[8, 7, 6, 5, 4, 3, 2, 1]);
        assert_eq!(b[19], 1);
        assert_eq!(&b[20..28], &[0x22, 0x11, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&b[28..32], &11_000u32.to_le_bytes());
    }

    #[test]
    fn merge_and_split() {
        let s1 = vec![
            rec(DetectorId::One, 10, 5_000),
            rec(DetectorId::One, 30, 6_000),
        ];
        let s2 = vec![
            rec(DetectorId::Two, 10, 7_000),
            rec(DetectorId::Two, 20, 8_000),
        ];
        let f = ListModeFile::from_streams(ListModeHeader::new(10, 1), &[s1.clone(), s2.clone()]);
        let ts: Vec<_> = f
            .records
            .iter()
            .map(|r| (r.detector as u8, r.timestamp))
            .collect();
        assert_eq!(ts, vec![(1, 10), (2, 10), (2, 20), (1, 30)]);
        assert_eq!(f.split_streams(), [s1, s2]);
    }

    #[test]
    fn malformed_inputs() {
        let good = ListModeFile {
            header: ListModeHeader::new(20, 7),
            records: vec![rec(DetectorId::One, 5, 1)],
        }
        .encode();
        assert!(ListModeFile::decode(&good[..10]).is_err());
        assert!(ListModeFile::decode(&good[..good.len() - 1]).is_err());
        let mut bad = good.clone();
        bad[0] = b'Y';
        assert!(ListModeFile::decode(&bad).is_err());
        let mut bad = good.clone();
        bad[19] = 7;
        assert!(ListModeFile::decode(&bad).is_err());
        let mut bad = good.clone();
        bad[10] = 1;
        bad[19] = 1;
        assert!(ListModeFile::decode(&bad).is_err());
        let mut bad = good;
        bad[28..32].copy_from_slice(&0u32.to_le_bytes());
        assert!(ListModeFile::decode(&bad).is_err());
    }

    #[test]
    fn out_of_order_detector_rejected() {
        let f = ListModeFile {
            header: ListModeHeader::new(20, 0),
            records: vec![
                rec(DetectorId::One, 50, 9),
                rec(DetectorId::Two, 10, 9),
                rec(DetectorId::One, 40, 9),
            ],
        };
        assert!(ListModeFile::decode(&f.encode()).is_err());
    }
}
