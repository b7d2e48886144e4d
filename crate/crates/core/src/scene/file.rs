//! Text scene format.
//!
//! ```text
//! scene v1
//! fruit <id> <cx> <cy> <cz> <r>
//! leaf <cx> <cy> <cz> <qx> <qy> <qz> <qw> <ex> <ey> <ez>
//! stem <cx> <cy> <cz> <r> <h>
//! ```
//!
//! Leaf extents are half-extents along the leaf's local axes. Two optional
//! records describe the world and trolley schedule:
//!
//! ```text
//! bounds <min x> <min y> <min z> <max x> <max y> <max z>
//! segment <index> <bx> <by> <bz> <yaw> <ws min x> <ws min y> <ws min z> <ws max x> <ws max y> <ws max z>
//! ```
//!
//! Without a `bounds` record the bounds enclose all primitives with a 0.1 m
//! margin. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use super::{Foliage, Fruit, Leaf, Scene, SegmentPlacement, Stem, TrolleyBase};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};

pub const SCENE_HEADER: &str = "scene v1";

pub fn scene_to_string(scene: &Scene, segments: &[SegmentPlacement]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{SCENE_HEADER}");
    let b = &scene.bounds;
    let _ = writeln!(
        s,
        "bounds {} {} {} {} {} {}",
        b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z
    );
    for seg in segments {
        let t = &seg.trolley_base;
        let w = &seg.workspace;
        let _ = writeln!(
            s,
            "segment {} {} {} {} {} {} {} {} {} {} {}",
            seg.segment_index,
            t.position.x,
            t.position.y,
            t.position.z,
            t.yaw,
            w.min.x,
            w.min.y,
            w.min.z,
            w.max.x,
            w.max.y,
            w.max.z
        );
    }
    for f in &scene.fruits {
        let c = f.center;
        let _ = writeln!(s, "fruit {} {} {} {} {}", f.id, c.x, c.y, c.z, f.radius);
    }
    for g in &scene.foliage {
        match g {
            Foliage::Leaf(l) => {
                let c = l.center;
                let q = l.orientation.quaternion();
                let e = l.half_extents;
                let _ = writeln!(
                    s,
                    "leaf {} {} {} {} {} {} {} {} {} {}",
                    c.x, c.y, c.z, q.i, q.j, q.k, q.w, e.x, e.y, e.z
                );
            }
            Foliage::Stem(st) => {
                let c = st.center;
                let _ = writeln!(s, "stem {} {} {} {} {}", c.x, c.y, c.z, st.radius, st.height);
            }
        }
    }
    s
}

fn nums(line: usize, fields: &[&str], n: usize) -> Result<Vec<f64>> {
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

/// Parses a scene file. Segment time budgets are left at zero for the caller
/// to fill in.
pub fn parse_scene(text: &str) -> Result<(Scene, Vec<SegmentPlacement>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, SCENE_HEADER)) => {}
        Some((ln, _)) => {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected `{SCENE_HEADER}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 0,
                msg: "empty scene file".into(),
            })
        }
    }
    let mut fruits = Vec::new();
    let mut foliage = Vec::new();
    let mut bounds = None;
    let mut segments = Vec::new();
    for (ln, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let rest = &parts[1..];
        match parts[0] {
            "fruit" => {
                let v = nums(ln, rest, 5)?;
                let id = rest[0].parse::<u32>().map_err(|e| Error::Parse {
                    line: ln,
                    msg: format!("bad fruit id: {e}"),
                })?;
                fruits.push(Fruit {
                    id,
                    center: Point::new(v[1], v[2], v[3]),
                    radius: v[4],
                });
            }
            "leaf" => {
                let v = nums(ln, rest, 10)?;
                let q = Quaternion::new(v[6], v[3], v[4], v[5]);
                if (q.norm() - 1.0).abs() > 1e-6 {
                    return Err(Error::Parse {
                        line: ln,
                        msg: "leaf quaternion is not unit length".into(),
                    });
                }
                foliage.push(Foliage::Leaf(Leaf {
                    center: Point::new(v[0], v[1], v[2]),
                    orientation: UnitQuaternion::new_unchecked(q),
                    half_extents: Vector3::new(v[7], v[8], v[9]),
                }));
            }
            "stem" => {
                let v = nums(ln, rest, 5)?;
                foliage.push(Foliage::Stem(Stem {
                    center: Point::new(v[0], v[1], v[2]),
                    radius: v[3],
                    height: v[4],
                }));
            }
            "bounds" => {
                let v = nums(ln, rest, 6)?;
                bounds = Some(Aabb::new(Point::new(v[0], v[1], v[2]), Point::new(v[3], v[4], v[5])));
            }
            "segment" => {
                let v = nums(ln, rest, 11)?;
                segments.push(SegmentPlacement {
                    segment_index: v[0] as usize,
                    trolley_base: TrolleyBase {
                        position: Point::new(v[1], v[2], v[3]),
                        yaw: v[4],
                    },
                    workspace: Aabb::new(Point::new(v[5], v[6], v[7]), Point::new(v[8], v[9], v[10])),
                    time_budget: 0.0,
                });
            }
            other => {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("unknown record `{other}`"),
                })
            }
        }
    }
    let bounds = match bounds {
        Some(b) => b,
        None => {
            let mut b: Option<Aabb> = None;
            let mut add = |bb: Aabb| b = Some(b.map_or(bb, |x| x.union(&bb)));
            for f in &fruits {
                add(Aabb::from_center_half_extents(f.center, Point::repeat(f.radius)));
            }
            for g in &foliage {
                add(match g {
                    Foliage::Leaf(l) => l.aabb(),
                    Foliage::Stem(s) => {
                        Aabb::from_center_half_extents(s.center, Vector3::new(s.radius, s.radius, 0.5 * s.height))
                    }
                });
            }
            b.ok_or(Error::Parse {
                line: 0,
                msg: "scene has no primitives and no bounds".into(),
            })?
            .padded(0.1)
        }
    };
    let scene = Scene {
        fruits,
        foliage,
        bounds,
    };
    scene.validate()?;
    Ok((scene, segments))
}
