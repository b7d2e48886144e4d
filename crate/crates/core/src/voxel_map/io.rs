//! Text cell-dump format.
//!
//! ```text
//! vmp-map v1
//! resolution 0.02
//! origin <x> <y> <z>
//! bounds <min x> <min y> <min z> <max x> <max y> <max z>
//! cells <n>
//! <i> <j> <k> <occ_logodds> <roi_logodds>
//! ...
//! ```
//!
//! Cells are written in key order. Floats use the shortest representation
//! that parses back to the same value.

use std::io::{BufRead, Write};

use super::{CellBelief, CellKey, MapConfig, OccupancyMap};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};

pub const MAP_HEADER: &str = "vmp-map v1";

pub fn write_map<W: Write>(map: &OccupancyMap, mut w: W) -> Result<()> {
    let o = map.origin();
    let b = map.bounds();
    writeln!(w, "{MAP_HEADER}")?;
    writeln!(w, "resolution {}", map.resolution())?;
    writeln!(w, "origin {} {} {}", o.x, o.y, o.z)?;
    writeln!(
        w,
        "bounds {} {} {} {} {} {}",
        b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z
    )?;
    let cells = map.sorted_cells();
    writeln!(w, "cells {}", cells.len())?;
    for (k, c) in cells {
        writeln!(w, "{} {} {} {} {}", k.i, k.j, k.k, c.occ_logodds, c.roi_logodds)?;
    }
    Ok(())
}

pub fn map_to_string(map: &OccupancyMap) -> String {
    let mut buf = Vec::new();
    write_map(map, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("map dump is ASCII")
}

fn parse_floats(line: usize, fields: &[&str], n: usize) -> Result<Vec<f64>> {
    if fields.len() != n {
        return Err(Error::Parse {
            line,
            msg: format!("expected {n} values, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad number `{f}`: {e}"),
            })
        })
        .collect()
}

/// Reads a map dump. Sensor-model parameters other than the resolution are
/// taken from `config`.
pub fn read_map<R: BufRead>(r: R, config: MapConfig) -> Result<OccupancyMap> {
    let mut lines = r.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, l)) => Ok((i + 1, l?)),
            None => Err(Error::Parse {
                line: 0,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    };
    let (ln, header) = next("header")?;
    if header.trim() != MAP_HEADER {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected `{MAP_HEADER}`"),
        });
    }
    let mut field = |name: &str, n: usize| -> Result<Vec<f64>> {
        let (ln, l) = next(name)?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() != Some(&name) {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected `{name}`"),
            });
        }
        parse_floats(ln, &parts[1..], n)
    };
    let res = field("resolution", 1)?[0];
    let origin = field("origin", 3)?;
    let b = field("bounds", 6)?;
    let n = field("cells", 1)?[0] as usize;
    let bounds = Aabb::new(Point::new(b[0], b[1], b[2]), Point::new(b[3], b[4], b[5]));
    let mut map = OccupancyMap::new(
        bounds,
        MapConfig {
            resolution: res,
            ..config
        },
    )?;
    if (map.origin() - Point::new(origin[0], origin[1], origin[2])).norm() > 0.0 {
        return Err(Error::Parse {
            line: 3,
            msg: "origin must equal the bounds minimum corner".into(),
        });
    }
    for _ in 0..n {
        let (ln, l) = next("cell record")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(Error::Parse {
                line: ln,
                msg: "cell record needs 5 fields".into(),
            });
        }
        let idx: Vec<i32> = parts[..3]
            .iter()
            .map(|p| {
                p.parse::<i32>().map_err(|e| Error::Parse {
                    line: ln,
                    msg: format!("bad index `{p}`: {e}"),
                })
            })
            .collect::<Result<_>>()?;
        let v = parse_floats(ln, &parts[3..], 2)?;
        let key = CellKey::new(idx[0], idx[1], idx[2]);
        if !map.in_bounds(&key) {
            return Err(Error::Parse {
                line: ln,
                msg: "cell outside bounds".into(),
            });
        }
        map.set_belief(
            key,
            CellBelief {
                occ_logodds: v[0],
                roi_logodds: v[1],
            },
        );
    }
    Ok(map)
}
