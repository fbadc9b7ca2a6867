//! Plain-text dumps: profile CSV and Wavefront OBJ.

use std::io::{self, Write};

use super::mesh::Mesh;
use super::ProfileCurve;

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

/// Writes `s,x,z,lambda,mu,epsilon`, one row per sample.
pub fn write_profile_csv(p: &ProfileCurve, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "s,x,z,lambda,mu,epsilon")?;
    for q in &p.samples {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt17(q.s),
            fmt17(q.x),
            fmt17(q.z),
            fmt17(q.lambda),
            fmt17(q.mu),
            q.epsilon.value() as i8
        )?;
    }
    Ok(())
}

/// Writes `v x y z` lines followed by 1-based `f i j k` lines.
pub fn write_obj(m: &Mesh, mut w: impl Write) -> io::Result<()> {
    for v in &m.vertices {
        writeln!(w, "v {} {} {}", fmt17(v[0]), fmt17(v[1]), fmt17(v[2]))?;
    }
    for t in &m.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Sign;
    use crate::profile::{EndpointKind, Sample};

    #[test]
    fn csv_round_trips_values() {
        let p = ProfileCurve {
            samples: vec![Sample {
                s: 0.1,
                x: 1.0 / 3.0,
                z: -2.5,
                lambda: 1e-20,
                mu: 0.0,
                epsilon: Sign::Minus,
            }],
            left_end: EndpointKind::RegularContinuation,
            right_end: EndpointKind::RegularContinuation,
            period_z: None,
            events: vec![],
        };
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,x,z,lambda,mu,epsilon"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(row[3].parse::<f64>().unwrap(), 1e-20);
        assert_eq!(row[5], "-1");
    }

    #[test]
    fn obj_is_one_based_with_apexes_first() {
        let m = Mesh::from_rings(&[(0.0, -1.0), (1.0, 0.0), (0.0, 1.0)], 4).unwrap();
        let mut buf = Vec::new();
        write_obj(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
        assert_eq!(first, ["v", "0", "0", "-1.0000000000000000e0"]);
        let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
        assert_eq!(faces.len(), 8);
        assert!(faces.iter().all(|f| !f.split(' ').any(|t| t == "0")));
    }
}
