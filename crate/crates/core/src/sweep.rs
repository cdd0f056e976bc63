//! Two-parameter grid sweeps of the two-user game.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate, ChannelParams, Coalition, Gains};
use crate::value::{as_two_user, value_two_user};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    H1,
    H2,
    Gamma1,
    Gamma2,
    Lambda,
}

impl SweepParam {
    fn apply(self, params: &mut ChannelParams, value: f64) {
        match (self, &mut params.gains) {
            (SweepParam::H1, Gains::TwoUser(h1, _)) => *h1 = value,
            (SweepParam::H2, Gains::TwoUser(_, h2)) => *h2 = value,
            (SweepParam::Gamma1, _) => params.gammas[0] = value,
            (SweepParam::Gamma2, _) => params.gammas[1] = value,
            (SweepParam::Lambda, _) => params.lambda = value,
            (_, Gains::Degraded(_)) => unreachable!("sweeps run on two-user templates"),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::H1 => "h1",
            SweepParam::H2 => "h2",
            SweepParam::Gamma1 => "gamma1",
            SweepParam::Gamma2 => "gamma2",
            SweepParam::Lambda => "lambda",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h1" => Ok(SweepParam::H1),
            "h2" => Ok(SweepParam::H2),
            "gamma1" => Ok(SweepParam::Gamma1),
            "gamma2" => Ok(SweepParam::Gamma2),
            "lambda" => Ok(SweepParam::Lambda),
            other => Err(Error::Parse(format!(
                "unknown sweep parameter {other:?}, expected h1, h2, gamma1, gamma2 or lambda"
            ))),
        }
    }
}

/// One swept parameter: values `start + i·step` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepAxis {
    pub fn new(param: SweepParam, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parse(format!(
                "sweep step must be positive, got {step}"
            )));
        }
        if !(start.is_finite() && stop.is_finite() && start <= stop) {
            return Err(Error::Parse(format!(
                "sweep range needs start ≤ stop, got {start}..{stop}"
            )));
        }
        Ok(SweepAxis {
            param,
            start,
            stop,
            step,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                // snap accumulated rounding so 0.1·3 prints as 0.3
                (v * 1e12).round() / 1e12
            })
            .collect()
    }
}

/// Parses `name=start:stop:step`, e.g. `h1=0:2:0.1`.
impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected name=start:stop:step, got {s:?}"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<f64> = range
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        SweepAxis::new(name.trim().parse()?, start, stop, step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
    pub template: ChannelParams,
}

impl SweepSpec {
    /// Two-transmitter degraded templates are lifted to equal gains.
    pub fn new(template: &ChannelParams, axis1: SweepAxis, axis2: SweepAxis) -> Result<Self> {
        let template = validate(template.clone())?;
        let template = match template.gains {
            Gains::TwoUser(..) => template,
            Gains::Degraded(_) => as_two_user(&template)?,
        };
        Ok(SweepSpec {
            axis1,
            axis2,
            template,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x1: f64,
    pub x2: f64,
    pub v1: f64,
    pub v2: f64,
    pub v12: f64,
    pub beneficial: bool,
}

/// Evaluates every grid cell, `axis1` outer and `axis2` inner.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let xs = spec.axis1.values();
    let ys = spec.axis2.values();
    let cells: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect();
    cells
        .par_iter()
        .map(|&(x1, x2)| {
            let mut p = spec.template.clone();
            spec.axis1.param.apply(&mut p, x1);
            spec.axis2.param.apply(&mut p, x2);
            let p = validate(p)?;
            let v = |bits| value_two_user(&p, Coalition::from_bits(bits)).map(|r| r.bits());
            let (v1, v2, v12) = (v(0b01)?, v(0b10)?, v(0b11)?);
            Ok(SweepRow {
                x1,
                x2,
                v1,
                v2,
                v12,
                beneficial: v12 >= v1 + v2,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(
    spec: &SweepSpec,
    rows: &[SweepRow],
    out: W,
    precision: usize,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record([
        spec.axis1.param.to_string(),
        spec.axis2.param.to_string(),
        "v1".into(),
        "v2".into(),
        "v12".into(),
        "beneficial".into(),
    ])
    .map_err(io)?;
    for r in rows {
        w.write_record([
            format!("{:.precision$}", r.x1),
            format!("{:.precision$}", r.x2),
            format!("{:.precision$}", r.v1),
            format!("{:.precision$}", r.v2),
            format!("{:.precision$}", r.v12),
            r.beneficial.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> ChannelParams {
        ChannelParams::two_user([1.0, 0.4], [0.6, 0.8], 0.1)
    }

    fn gain_spec() -> SweepSpec {
        SweepSpec::new(
            &template(),
            "h1=0:2:0.1".parse().unwrap(),
            "h2=0:2:0.1".parse().unwrap(),
        )
        .unwrap()
    }

    fn cell(rows: &[SweepRow], x1: f64, x2: f64) -> SweepRow {
        *rows
            .iter()
            .find(|r| (r.x1 - x1).abs() < 1e-9 && (r.x2 - x2).abs() < 1e-9)
            .unwrap()
    }

    #[test]
    fn axis_parsing() {
        let a: SweepAxis = "h1=0:2:0.1".parse().unwrap();
        assert_eq!(a.param, SweepParam::H1);
        let vals = a.values();
        assert_eq!(vals.len(), 21);
        assert_eq!(vals[3], 0.3);
        assert_eq!(vals[20], 2.0);
        assert!("h1=0:2".parse::<SweepAxis>().is_err());
        assert!("h3=0:2:0.1".parse::<SweepAxis>().is_err());
        assert!("h1=0:2:0".parse::<SweepAxis>().is_err());
        assert!("h1=2:0:0.1".parse::<SweepAxis>().is_err());
        assert_eq!(
            "lambda=0:0:1".parse::<SweepAxis>().unwrap().values(),
            vec![0.0]
        );
    }

    #[test]
    fn gain_sweep_cells() {
        let rows = run_sweep(&gain_spec()).unwrap();
        assert_eq!(rows.len(), 441);
        assert_eq!((rows[0].x1, rows[0].x2), (0.0, 0.0));
        assert_eq!((rows[1].x1, rows[1].x2), (0.0, 0.1));
        assert!(!cell(&rows, 0.1, 1.5).beneficial);
        assert!(cell(&rows, 0.6, 0.8).beneficial);
        assert!(cell(&rows, 0.0, 0.0).beneficial);
    }

    #[test]
    fn deterministic_csv() {
        let spec = gain_spec();
        let rows = run_sweep(&spec).unwrap();
        let mut a = Vec::new();
        write_sweep_csv(&spec, &rows, &mut a, 6).unwrap();
        let mut b = Vec::new();
        write_sweep_csv(&spec, &run_sweep(&spec).unwrap(), &mut b, 6).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("h1,h2,v1,v2,v12,beneficial\n0.000000,0.000000,"));
        assert_eq!(text.lines().count(), 442);
    }

    #[test]
    fn degraded_template_is_lifted() {
        let spec = SweepSpec::new(
            &ChannelParams::degraded([1.0, 0.4], 0.3, 0.1),
            "gamma1=0.5:1:0.5".parse().unwrap(),
            "lambda=0:0.2:0.1".parse().unwrap(),
        )
        .unwrap();
        assert_eq!(spec.template.gains, Gains::TwoUser(0.3, 0.3));
        assert_eq!(run_sweep(&spec).unwrap().len(), 6);
    }

    #[test]
    fn invalid_cells_are_reported() {
        let spec = SweepSpec::new(
            &template(),
            "gamma1=0:1:0.5".parse().unwrap(),
            "h2=0:1:0.5".parse().unwrap(),
        )
        .unwrap();
        assert!(matches!(
            run_sweep(&spec),
            Err(Error::NonPositivePower { index: 0, .. })
        ));
    }
}
