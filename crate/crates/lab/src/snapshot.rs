//! The `LLSNAP01` field container.
//!
//! Layout (little-endian): magic `LLSNAP01`, a 16-byte NUL-padded role tag,
//! time `f64`, spatial dimension `u32`, `n_x` `u32`, period `f64`, `n_v` `u32`
//! (0 for fluid snapshots), velocity extent `f64`, components per x-node `u32`,
//! value count `u64`, then the values row-major with the x-node index slowest.
//! A JSON sidecar with the same stem mirrors the header.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use landau_core::maxwellian::FluidState;
use landau_core::phase_space::{DistributionField, Role, SpatialGrid, VelocityGrid};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, LabError, Result};

pub const MAGIC: &[u8; 8] = b"LLSNAP01";
const TAG_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub role: String,
    pub time: f64,
    pub space_dim: u32,
    pub n_x: u32,
    pub period: f64,
    pub n_v: u32,
    pub extent: f64,
    pub components: u32,
    pub count: u64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Field(DistributionField),
    Fluid {
        space: SpatialGrid,
        time: f64,
        state: FluidState,
    },
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn write_all(path: &Path, header: &SnapshotHeader, values: &[f64]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut tag = [0u8; TAG_LEN];
    tag[..header.role.len()].copy_from_slice(header.role.as_bytes());
    let mut head = Vec::with_capacity(80);
    head.extend_from_slice(MAGIC);
    head.extend_from_slice(&tag);
    head.extend_from_slice(&header.time.to_le_bytes());
    head.extend_from_slice(&header.space_dim.to_le_bytes());
    head.extend_from_slice(&header.n_x.to_le_bytes());
    head.extend_from_slice(&header.period.to_le_bytes());
    head.extend_from_slice(&header.n_v.to_le_bytes());
    head.extend_from_slice(&header.extent.to_le_bytes());
    head.extend_from_slice(&header.components.to_le_bytes());
    head.extend_from_slice(&header.count.to_le_bytes());
    w.write_all(&head).map_err(io_err(path))?;
    for v in values {
        w.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(header).expect("header serializes");
    std::fs::write(&side, json + "\n").map_err(io_err(side))?;
    Ok(())
}

pub fn write_field(path: &Path, field: &DistributionField, label: &str) -> Result<()> {
    let header = SnapshotHeader {
        format: "LLSNAP01".into(),
        role: field.role.tag().into(),
        time: field.time,
        space_dim: field.space.dim() as u32,
        n_x: field.space.n() as u32,
        period: field.space.period(),
        n_v: field.velocity.n() as u32,
        extent: field.velocity.extent(),
        components: field.velocity.len() as u32,
        count: field.values.len() as u64,
        label: label.into(),
    };
    write_all(path, &header, &field.values)
}

/// Writes `(ρ, u_1, u_2, u_3, θ)` per x-node.
pub fn write_fluid(path: &Path, state: &FluidState, space: &SpatialGrid, time: f64, label: &str) -> Result<()> {
    let n = state.len();
    let mut values = Vec::with_capacity(5 * n);
    for k in 0..n {
        values.extend_from_slice(&[state.rho[k], state.u[0][k], state.u[1][k], state.u[2][k], state.theta[k]]);
    }
    let header = SnapshotHeader {
        format: "LLSNAP01".into(),
        role: Role::Fluid.tag().into(),
        time,
        space_dim: space.dim() as u32,
        n_x: space.n() as u32,
        period: space.period(),
        n_v: 0,
        extent: 0.0,
        components: 5,
        count: values.len() as u64,
        label: label.into(),
    };
    write_all(path, &header, &values)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> Option<[u8; N]> {
        let s = self.bytes.get(self.at..self.at + N)?;
        self.at += N;
        s.try_into().ok()
    }
    fn u32(&mut self) -> Option<u32> {
        self.take().map(u32::from_le_bytes)
    }
    fn u64(&mut self) -> Option<u64> {
        self.take().map(u64::from_le_bytes)
    }
    fn f64(&mut self) -> Option<f64> {
        self.take().map(f64::from_le_bytes)
    }
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bad = |m: &str| LabError::Snapshot {
        path: path.to_path_buf(),
        message: m.to_string(),
    };
    let file = File::open(path).map_err(io_err(path))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(io_err(path))?;
    let mut c = Cursor { bytes: &bytes, at: 0 };
    if c.take::<8>().as_ref() != Some(MAGIC) {
        return Err(bad("missing LLSNAP01 magic"));
    }
    let tag = c.take::<TAG_LEN>().ok_or_else(|| bad("truncated header"))?;
    let end = tag.iter().position(|&b| b == 0).unwrap_or(TAG_LEN);
    let tag = std::str::from_utf8(&tag[..end]).map_err(|_| bad("role tag is not UTF-8"))?;
    let role = Role::from_tag(tag).ok_or_else(|| bad("unknown role tag"))?;
    let mut head = || -> Option<_> {
        Some((c.f64()?, c.u32()?, c.u32()?, c.f64()?, c.u32()?, c.f64()?, c.u32()?, c.u64()?))
    };
    let (time, dim, n_x, period, n_v, extent, components, count) = head().ok_or_else(|| bad("truncated header"))?;
    let space = SpatialGrid::new(dim as usize, n_x as usize, period).map_err(|e| bad(&e.to_string()))?;
    if count != space.len() as u64 * components as u64 {
        return Err(bad("value count does not match the grids"));
    }
    let body = &bytes[c.at..];
    if body.len() as u64 != count * 8 {
        return Err(bad("payload length does not match the value count"));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
        .collect();
    if role == Role::Fluid {
        if components != 5 || n_v != 0 {
            return Err(bad("fluid snapshot must have five components and no velocity grid"));
        }
        let col = |i: usize| values.iter().skip(i).step_by(5).copied().collect::<Vec<f64>>();
        return Ok(Snapshot::Fluid {
            space,
            time,
            state: FluidState {
                rho: col(0),
                u: [col(1), col(2), col(3)],
                theta: col(4),
            },
        });
    }
    let velocity = VelocityGrid::new(extent, n_v as usize).map_err(|e| bad(&e.to_string()))?;
    if velocity.len() as u64 != components as u64 {
        return Err(bad("component count does not match the velocity grid"));
    }
    Ok(Snapshot::Field(DistributionField {
        space,
        velocity,
        role,
        time,
        values,
    }))
}

pub fn read_header(path: &Path) -> Result<SnapshotHeader> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(io_err(&side))?;
    serde_json::from_str(&text).map_err(|e| LabError::Parse {
        path: side,
        message: e.to_string(),
    })
}
