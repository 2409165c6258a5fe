//! Rigid-sphere microphone array geometry, including a built-in
//! nearly-uniform 32-point layout and a plain-text file format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sh::{Direction, ShIndex};

/// Microphone directions on a rigid sphere of a given radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    radius: f64,
    mic_dirs: Vec<Direction>,
}

impl ArrayGeometry {
    pub fn new(radius: f64, mic_dirs: Vec<Direction>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "array radius must be positive, got {radius}"
            )));
        }
        if mic_dirs.is_empty() {
            return Err(Error::InvalidInput("array needs at least one microphone".into()));
        }
        Ok(Self { radius, mic_dirs })
    }

    /// Nearly-uniform 32-point layout: the 12 icosahedron vertices plus the
    /// 20 dodecahedron vertices (a pentakis dodecahedron), normalized to the
    /// unit sphere. Gives a steering-matrix condition number of ~2.5 at
    /// order 3.
    pub fn pentakis32(radius: f64) -> Result<Self> {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let mut pts: Vec<[f64; 3]> = Vec::with_capacity(32);
        for a in [1.0, -1.0] {
            for b in [phi, -phi] {
                pts.push([0.0, a, b]);
                pts.push([a, b, 0.0]);
                pts.push([b, 0.0, a]);
            }
        }
        for sx in [1.0, -1.0f64] {
            for sy in [1.0, -1.0f64] {
                for sz in [1.0, -1.0f64] {
                    pts.push([sx, sy, sz]);
                }
            }
        }
        for a in [1.0 / phi, -1.0 / phi] {
            for b in [phi, -phi] {
                pts.push([0.0, a, b]);
                pts.push([a, b, 0.0]);
                pts.push([b, 0.0, a]);
            }
        }
        let dirs = pts
            .into_iter()
            .map(Direction::from_vector)
            .collect::<Result<Vec<_>>>()?;
        Self::new(radius, dirs)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn num_mics(&self) -> usize {
        self.mic_dirs.len()
    }

    pub fn mic_dirs(&self) -> &[Direction] {
        &self.mic_dirs
    }

    /// Whether the microphone count can resolve the given order
    /// (`Q ≥ (N+1)²`).
    pub fn supports_order(&self, order: u32) -> bool {
        self.num_mics() >= ShIndex::count(order)
    }

    /// Parse the plain-text geometry format:
    ///
    /// ```text
    /// # comment
    /// radius_m 0.042
    /// <theta_deg> <phi_deg>     # one microphone per line
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut radius: Option<f64> = None;
        let mut dirs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            if radius.is_none() {
                let key = fields.next().unwrap_or("");
                if key != "radius_m" {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected 'radius_m <meters>', got '{content}'"),
                    });
                }
                let val: f64 = fields
                    .next()
                    .ok_or(Error::Parse {
                        line,
                        msg: "missing radius value".into(),
                    })?
                    .parse()
                    .map_err(|e| Error::Parse {
                        line,
                        msg: format!("bad radius: {e}"),
                    })?;
                if fields.next().is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: "trailing fields after radius".into(),
                    });
                }
                if !(val > 0.0 && val.is_finite()) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("radius must be positive, got {val}"),
                    });
                }
                radius = Some(val);
                continue;
            }
            let theta_deg: f64 = fields
                .next()
                .ok_or(Error::Parse {
                    line,
                    msg: "missing elevation".into(),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line,
                    msg: format!("bad elevation: {e}"),
                })?;
            let phi_deg: f64 = fields
                .next()
                .ok_or(Error::Parse {
                    line,
                    msg: "missing azimuth".into(),
                })?
                .parse()
                .map_err(|e| Error::Parse {
                    line,
                    msg: format!("bad azimuth: {e}"),
                })?;
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line,
                    msg: "trailing fields after direction".into(),
                });
            }
            let dir = Direction::from_degrees(theta_deg, phi_deg).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            dirs.push(dir);
        }
        let radius = radius.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing 'radius_m' line".into(),
        })?;
        Self::new(radius, dirs)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Serialize to the same text format accepted by [`ArrayGeometry::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# spherical array geometry: radius, then theta_deg phi_deg per mic\n");
        let _ = writeln!(out, "radius_m {}", self.radius);
        for d in &self.mic_dirs {
            let _ = writeln!(out, "{:.12} {:.12}", d.theta_deg(), d.phi_deg());
        }
        out
    }

    pub fn to_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}
