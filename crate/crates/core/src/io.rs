//! Reading and writing demonstrations and primitives.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{CompliantPrimitive, Demonstration, Frame, LearnerConfig, Pose, WrenchSample};

pub const CSV_HEADER: [&str; 14] = [
    "t", "px", "py", "pz", "qw", "qx", "qy", "qz", "fx", "fy", "fz", "tx", "ty", "tz",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SampleRecord {
    t: f64,
    p: [f64; 3],
    q: [f64; 4],
    f: [f64; 3],
    tq: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DemoFile {
    id: String,
    #[serde(default)]
    frame: Frame,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    samples: Vec<SampleRecord>,
}

fn to_sample(r: &SampleRecord) -> Result<WrenchSample> {
    Ok(WrenchSample {
        t: r.t,
        pose: Pose::from_wxyz(r.p, r.q)?,
        force: Vector3::from(r.f),
        torque: Vector3::from(r.tq),
    })
}

fn to_record(s: &WrenchSample) -> SampleRecord {
    SampleRecord {
        t: s.t,
        p: s.pose.position.into(),
        q: s.pose.wxyz(),
        f: s.force.into(),
        tq: s.torque.into(),
    }
}

pub fn demo_from_json_str(text: &str) -> Result<Demonstration> {
    let file: DemoFile = serde_json::from_str(text)?;
    let samples = file.samples.iter().map(to_sample).collect::<Result<_>>()?;
    Ok(Demonstration {
        id: file.id,
        frame: file.frame,
        samples,
    })
}

pub fn demo_to_json_string(demo: &Demonstration, seed: Option<u64>) -> Result<String> {
    let file = DemoFile {
        id: demo.id.clone(),
        frame: demo.frame,
        seed,
        samples: demo.samples.iter().map(to_record).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Reads CSV samples with the standard header. CSV carries no id or frame,
/// so both are supplied by the caller. Lines starting with `#` are skipped.
pub fn demo_from_csv<R: Read>(reader: R, id: &str, frame: Frame) -> Result<Demonstration> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Format(format!("unexpected CSV header {header:?}")));
    }
    let mut samples = Vec::new();
    for row in rdr.deserialize::<[f64; 14]>() {
        let v = row?;
        samples.push(to_sample(&SampleRecord {
            t: v[0],
            p: [v[1], v[2], v[3]],
            q: [v[4], v[5], v[6], v[7]],
            f: [v[8], v[9], v[10]],
            tq: [v[11], v[12], v[13]],
        })?);
    }
    Ok(Demonstration {
        id: id.to_string(),
        frame,
        samples,
    })
}

pub fn demo_to_csv<W: Write>(demo: &Demonstration, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for s in &demo.samples {
        let r = to_record(s);
        let row = [
            r.t, r.p[0], r.p[1], r.p[2], r.q[0], r.q[1], r.q[2], r.q[3], r.f[0], r.f[1], r.f[2], r.tq[0],
            r.tq[1], r.tq[2],
        ];
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a demonstration, choosing the format by extension (`.csv` or JSON).
pub fn read_demo(path: &Path) -> Result<Demonstration> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        demo_from_csv(BufReader::new(File::open(path)?), &id, Frame::World)
    } else {
        demo_from_json_str(&std::fs::read_to_string(path)?)
    }
}

pub fn write_demo(path: &Path, demo: &Demonstration, seed: Option<u64>) -> Result<()> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let mut w = BufWriter::new(File::create(path)?);
        if let Some(s) = seed {
            writeln!(w, "# seed={s}")?;
        }
        demo_to_csv(demo, w)
    } else {
        Ok(std::fs::write(path, demo_to_json_string(demo, seed)?)?)
    }
}

/// A primitive together with the settings and inputs it was learned from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveFile {
    pub primitive: CompliantPrimitive,
    pub config: LearnerConfig,
    pub demo_ids: Vec<String>,
}

pub fn primitive_to_json(file: &PrimitiveFile) -> Result<String> {
    Ok(serde_json::to_string_pretty(file)?)
}

/// Parses a primitive file and re-checks the primitive's invariants.
pub fn primitive_from_json(text: &str) -> Result<PrimitiveFile> {
    let file: PrimitiveFile = serde_json::from_str(text)?;
    file.primitive.check()?;
    Ok(file)
}

pub fn read_config(path: &Path) -> Result<LearnerConfig> {
    let cfg: LearnerConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;

    fn demo() -> Demonstration {
        let q = UnitQuaternion::from_euler_angles(0.1, -0.2, 0.3);
        Demonstration {
            id: "d0".into(),
            frame: Frame::Tool,
            samples: (0..3)
                .map(|i| WrenchSample {
                    t: i as f64 * 0.01,
                    pose: Pose::new(Vector3::new(0.1 * i as f64, 0.2, -0.3), q),
                    force: Vector3::new(1.0, 2.0, 3.0),
                    torque: Vector3::new(-0.1, 0.0, 0.25),
                })
                .collect(),
        }
    }

    #[test]
    fn json_round_trip() {
        let d = demo();
        let back = demo_from_json_str(&demo_to_json_string(&d, Some(7)).unwrap()).unwrap();
        assert_eq!(back.id, d.id);
        assert_eq!(back.frame, Frame::Tool);
        for (a, b) in d.samples.iter().zip(&back.samples) {
            assert_eq!(a.t, b.t);
            assert!((a.pose.position - b.pose.position).norm() < 1e-15);
            assert!(a.pose.orientation.angle_to(&b.pose.orientation) < 1e-12);
            assert_eq!(a.force, b.force);
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = demo();
        let mut buf = Vec::new();
        demo_to_csv(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,px,py,pz,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz"));
        let back = demo_from_csv(buf.as_slice(), "d0", Frame::Tool).unwrap();
        assert_eq!(back.samples.len(), 3);
        assert_eq!(back.samples[2].torque, d.samples[2].torque);
    }

    #[test]
    fn csv_file_keeps_seed_comment() {
        let dir = std::env::temp_dir().join(format!("demo-seed-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d0.csv");
        write_demo(&path, &demo(), Some(42)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# seed=42\n"));
        assert_eq!(read_demo(&path).unwrap().samples.len(), 3);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn frame_defaults_to_world() {
        let text = r#"{"id":"x","samples":[{"t":0,"p":[0,0,0],"q":[1,0,0,0],"f":[0,0,0],"tq":[0,0,0]}]}"#;
        assert_eq!(demo_from_json_str(text).unwrap().frame, Frame::World);
    }

    #[test]
    fn bad_quaternion_is_rejected() {
        let text = r#"{"id":"x","samples":[{"t":0,"p":[0,0,0],"q":[2,0,0,0],"f":[0,0,0],"tq":[0,0,0]}]}"#;
        assert!(matches!(demo_from_json_str(text), Err(Error::NonUnitQuaternion { .. })));
    }

    #[test]
    fn malformed_json_is_an_input_error() {
        let e = demo_from_json_str("{not json").unwrap_err();
        assert!(e.is_input_error());
    }
}
