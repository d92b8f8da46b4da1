use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;

/// Emitter amplitudes on a time grid together with their populations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `amplitudes[α][k]` = C_α(t_k).
    pub amplitudes: Vec<Vec<Complex64>>,
    /// `populations[α][k]` = |C_α(t_k)|².
    pub populations: Vec<Vec<f64>>,
    pub total: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, amplitudes: Vec<Vec<Complex64>>) -> Self {
        let populations: Vec<Vec<f64>> = amplitudes
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
            .collect();
        let total = (0..times.len())
            .map(|k| populations.iter().map(|p| p[k]).sum())
            .collect();
        Trajectory {
            times,
            amplitudes,
            populations,
            total,
        }
    }

    pub fn n_emitters(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Keeps every `stride`-th sample, starting from t = 0.
    pub fn decimate(&self, stride: usize) -> Trajectory {
        let pick = |v: &Vec<Complex64>| v.iter().step_by(stride).copied().collect();
        Trajectory::new(
            self.times.iter().step_by(stride).copied().collect(),
            self.amplitudes.iter().map(pick).collect(),
        )
    }

    /// Largest population difference against another trajectory on the same grid.
    pub fn max_population_deviation(&self, other: &Trajectory) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.populations.iter().zip(&other.populations) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
        for (x, y) in self.total.iter().zip(&other.total) {
            worst = worst.max((x - y).abs());
        }
        worst
    }

    pub fn csv_header(n: usize) -> String {
        let mut cols = vec!["t".to_string()];
        for i in 1..=n {
            cols.push(format!("Re_C_{i}"));
            cols.push(format!("Im_C_{i}"));
        }
        for i in 1..=n {
            cols.push(format!("P_{i}"));
        }
        cols.push("P_total".into());
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", Self::csv_header(self.n_emitters()))?;
        for k in 0..self.len() {
            let mut row = vec![fmt17(self.times[k])];
            for c in &self.amplitudes {
                row.push(fmt17(c[k].re));
                row.push(fmt17(c[k].im));
            }
            for p in &self.populations {
                row.push(fmt17(p[k]));
            }
            row.push(fmt17(self.total[k]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
