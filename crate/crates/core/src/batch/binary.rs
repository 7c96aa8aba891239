//! Binary grid dump.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `SGB1`                              |
//! | 4      | 8    | N (u64)                                   |
//! | 12     | 8    | M (u64)                                   |
//! | 20     | 4    | precision in bits (u32, 32 or 64)         |
//! | 24     | 8    | plane order `xyzuvwe\0`                   |
//! | 32     |      | planes rx, ry, rz, vx, vy, vz as N·M floats each, then N·M error-code bytes |
//!
//! Every plane is row-major: cell `(i, j)` is element `i * M + j`.

use std::io::{self, Write};

use thiserror::Error;

use super::{AnyBatchResult, BatchResult};
use crate::kernel::ErrorCode;
use crate::real::Float;
use crate::Precision;

pub const DUMP_MAGIC: &[u8; 4] = b"SGB1";
pub const PLANE_ORDER: &[u8; 8] = b"xyzuvwe\0";
pub const DUMP_HEADER_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("not a grid dump (bad magic or plane order)")]
    BadHeader,
    #[error("unsupported precision {0}")]
    Precision(u32),
    #[error("dump truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid error code {0}")]
    ErrorCode(u8),
}

pub fn write_dump<T: Float, W: Write>(result: &BatchResult<T>, mut w: W) -> io::Result<()> {
    let mut header = Vec::with_capacity(DUMP_HEADER_LEN);
    header.extend_from_slice(DUMP_MAGIC);
    header.extend_from_slice(&(result.n as u64).to_le_bytes());
    header.extend_from_slice(&(result.m as u64).to_le_bytes());
    header.extend_from_slice(&T::PRECISION.bits().to_le_bytes());
    header.extend_from_slice(PLANE_ORDER);
    w.write_all(&header)?;

    let mut buf = Vec::with_capacity(64 * 1024);
    for plane in &result.planes {
        for chunk in plane.chunks(8 * 1024) {
            buf.clear();
            for &x in chunk {
                x.write_le(&mut buf);
            }
            w.write_all(&buf)?;
        }
    }
    let codes: Vec<u8> = result.errors.iter().map(|e| *e as u8).collect();
    w.write_all(&codes)?;
    w.flush()
}

fn read_planes<T: Float>(n: usize, m: usize, body: &[u8]) -> Result<BatchResult<T>, DumpError> {
    let cells = n * m;
    let expected = cells * (6 * T::BYTES + 1);
    if body.len() != expected {
        return Err(DumpError::Truncated {
            expected: expected + DUMP_HEADER_LEN,
            found: body.len() + DUMP_HEADER_LEN,
        });
    }
    let mut planes: [Vec<T>; 6] = Default::default();
    for (p, plane) in planes.iter_mut().enumerate() {
        let bytes = &body[p * cells * T::BYTES..(p + 1) * cells * T::BYTES];
        *plane = bytes.chunks_exact(T::BYTES).map(T::read_le).collect();
    }
    let errors = body[6 * cells * T::BYTES..]
        .iter()
        .map(|&b| ErrorCode::from_u8(b).ok_or(DumpError::ErrorCode(b)))
        .collect::<Result<_, _>>()?;
    Ok(BatchResult { n, m, planes, errors })
}

pub fn read_dump(bytes: &[u8]) -> Result<AnyBatchResult, DumpError> {
    if bytes.len() < DUMP_HEADER_LEN {
        return Err(DumpError::Truncated {
            expected: DUMP_HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != DUMP_MAGIC || &bytes[24..32] != PLANE_ORDER {
        return Err(DumpError::BadHeader);
    }
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes")) as usize;
    let (n, m) = (u64_at(4), u64_at(12));
    let bits = u32::from_le_bytes(bytes[20..24].try_into().expect("4 bytes"));
    let body = &bytes[DUMP_HEADER_LEN..];
    match Precision::from_bits(bits) {
        Some(Precision::Single) => read_planes::<f32>(n, m, body).map(AnyBatchResult::Single),
        Some(Precision::Double) => read_planes::<f64>(n, m, body).map(AnyBatchResult::Double),
        None => Err(DumpError::Precision(bits)),
    }
}
