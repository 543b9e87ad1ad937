//! Binary model files and CSV loss traces.
//!
//! Model layout, all integers and floats little-endian:
//! `LPKM` magic, `u32` version, `u32` dim count, `u64` per dim, then for
//! each layer its row-major weights followed by its biases as `f64`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::mlp::{Layer, MlpModel};
use super::TrainTrace;
use crate::error::{Error, Result};
use crate::textio::{create, finish};

pub const MODEL_MAGIC: &[u8; 4] = b"LPKM";
pub const MODEL_VERSION: u32 = 1;

pub fn save_model(model: &MlpModel, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    let dims = model.layer_dims();
    w.write_all(MODEL_MAGIC).map_err(io)?;
    w.write_all(&MODEL_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(dims.len() as u32).to_le_bytes()).map_err(io)?;
    for d in dims {
        w.write_all(&(d as u64).to_le_bytes()).map_err(io)?;
    }
    for v in model.flat_params() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    finish(path, w)
}

pub fn load_model(path: &Path) -> Result<MlpModel> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |msg: &str| Error::Format(format!("{}: {msg}", path.display()));
    let mut read = |buf: &mut [u8]| r.read_exact(buf).map_err(|_| bad("truncated model file"));

    let mut magic = [0u8; 4];
    read(&mut magic)?;
    if &magic != MODEL_MAGIC {
        return Err(bad("not a model file (bad magic)"));
    }
    let mut word = [0u8; 4];
    read(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != MODEL_VERSION {
        return Err(bad(&format!("unsupported model version {version}")));
    }
    read(&mut word)?;
    let count = u32::from_le_bytes(word) as usize;
    if !(2..=64).contains(&count) {
        return Err(bad("implausible layer count"));
    }
    let mut dims = Vec::with_capacity(count);
    let mut long = [0u8; 8];
    for _ in 0..count {
        read(&mut long)?;
        let d = u64::from_le_bytes(long);
        if d == 0 || d > 1 << 24 {
            return Err(bad("implausible layer width"));
        }
        dims.push(d as usize);
    }
    let mut layers = Vec::with_capacity(count - 1);
    for pair in dims.windows(2) {
        let (i, o) = (pair[0], pair[1]);
        let mut take = |n: usize| -> Result<Vec<f64>> {
            (0..n)
                .map(|_| {
                    read(&mut long)?;
                    Ok(f64::from_le_bytes(long))
                })
                .collect()
        };
        let weights = take(i * o)?;
        let bias = take(o)?;
        layers.push(Layer {
            in_dim: i,
            out_dim: o,
            weights,
            bias,
        });
    }
    if read(&mut [0u8; 1]).is_ok() {
        return Err(bad("trailing bytes after parameters"));
    }
    MlpModel::from_layers(layers).map_err(|e| bad(&e.to_string()))
}

/// `epoch,loss` rows with 1-based epochs.
pub fn write_trace_csv(trace: &TrainTrace, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "epoch,loss").map_err(|e| Error::io(path, e))?;
    for (i, l) in trace.losses.iter().enumerate() {
        writeln!(w, "{},{l}", i + 1).map_err(|e| Error::io(path, e))?;
    }
    finish(path, w)
}

pub fn read_trace_csv(path: &Path) -> Result<TrainTrace> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut losses = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let loss = line
            .split(',')
            .nth(1)
            .and_then(|v| v.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected epoch,loss".into(),
            })?;
        losses.push(loss);
    }
    Ok(TrainTrace { losses })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip_is_exact() {
        let m = MlpModel::new(&[6, 5, 3, 1], 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        save_model(&m, &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], MODEL_MAGIC);
        assert_eq!(bytes.len(), 4 + 4 + 4 + 8 * 4 + 8 * m.num_params());
        assert_eq!(load_model(&p).unwrap(), m);
    }

    #[test]
    fn corrupt_models_rejected() {
        let m = MlpModel::new(&[2, 2, 1], 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        save_model(&m, &p).unwrap();
        let good = std::fs::read(&p).unwrap();

        std::fs::write(&p, &good[..good.len() - 3]).unwrap();
        assert!(matches!(load_model(&p), Err(Error::Format(_))));
        let mut extra = good.clone();
        extra.push(0);
        std::fs::write(&p, &extra).unwrap();
        assert!(load_model(&p).is_err());
        let mut magic = good;
        magic[0] = b'X';
        std::fs::write(&p, &magic).unwrap();
        assert!(load_model(&p).is_err());
    }

    #[test]
    fn trace_csv_round_trip() {
        let t = TrainTrace {
            losses: vec![0.7, 0.5, 1.0 / 3.0],
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("trace.csv");
        write_trace_csv(&t, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("epoch,loss\n1,0.7\n"));
        assert_eq!(read_trace_csv(&p).unwrap(), t);
    }
}
