//! Curve tables and their CSV form.
//!
//! Values are written with `{:.16e}` (17 significant digits), which parses
//! back to the identical `f64`. Header comment lines carry the provenance,
//! warnings and ordering flags.

use std::fmt::Write as _;

use crate::spec::RateUnit;
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// A named check on the relative order of curves.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub unit: RateUnit,
    pub rates: Vec<f64>,
    pub columns: Vec<Column>,
    pub warnings: Vec<String>,
    /// Informational lines such as the tangency point.
    pub notes: Vec<String>,
    pub flags: Vec<Flag>,
    /// Set when a bound was computed outside the conditions that make it a
    /// valid bound.
    pub void: bool,
    pub provenance: Provenance,
}

impl CurveTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn all_flags_ok(&self) -> bool {
        self.flags.iter().all(|f| f.ok)
    }

    /// The same table with rates and exponents in `unit`. Conversion is only
    /// defined from nats.
    pub fn in_unit(&self, unit: RateUnit) -> CurveTable {
        assert_eq!(self.unit, RateUnit::Nats, "unit conversion starts from nats");
        let conv = |v: &[f64]| v.iter().map(|&x| unit.from_nats(x)).collect();
        CurveTable {
            unit,
            rates: conv(&self.rates),
            columns: self.columns.iter().map(|c| Column { name: c.name.clone(), values: conv(&c.values) }).collect(),
            ..self.clone()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("# ebound curve table\n");
        let p = &self.provenance;
        let _ = writeln!(s, "# config-hash: {}", p.config_hash);
        let _ = writeln!(s, "# seed: {}", p.seed);
        let _ = writeln!(s, "# version: {}", p.version);
        let _ = writeln!(s, "# unit: {}", self.unit);
        let _ = writeln!(s, "# void: {}", self.void);
        for w in &self.warnings {
            let _ = writeln!(s, "# warning: {w}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "# note: {n}");
        }
        for f in &self.flags {
            let _ = writeln!(s, "# flag: {} {} | {}", if f.ok { "ok" } else { "FAIL" }, f.name, f.detail);
        }
        s += "R";
        for c in &self.columns {
            s.push(',');
            s += &c.name;
        }
        s.push('\n');
        for (k, r) in self.rates.iter().enumerate() {
            let _ = write!(s, "{r:.16e}");
            for c in &self.columns {
                let _ = write!(s, ",{:.16e}", c.values[k]);
            }
            s.push('\n');
        }
        s
    }

    /// Whitespace-separated columns for plotting tools.
    pub fn to_plot_data(&self) -> String {
        let mut s = format!("# R[{}]", self.unit);
        for c in &self.columns {
            let _ = write!(s, " {}", c.name);
        }
        s.push('\n');
        for (k, r) in self.rates.iter().enumerate() {
            let _ = write!(s, "{r:.10e}");
            for c in &self.columns {
                let v = c.values[k];
                if v.is_finite() {
                    let _ = write!(s, " {v:.10e}");
                } else {
                    s += " NaN";
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let bad = |line: usize, m: &str| CliError::Table(format!("line {line}: {m}"));
        let mut table = CurveTable {
            unit: RateUnit::Nats,
            rates: Vec::new(),
            columns: Vec::new(),
            warnings: Vec::new(),
            notes: Vec::new(),
            flags: Vec::new(),
            void: false,
            provenance: Provenance { config_hash: String::new(), seed: 0, version: String::new() },
        };
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            if let Some(meta) = line.strip_prefix("# ") {
                let Some((key, value)) = meta.split_once(": ") else { continue };
                match key {
                    "config-hash" => table.provenance.config_hash = value.to_string(),
                    "seed" => table.provenance.seed = value.parse().map_err(|_| bad(ln, "bad seed"))?,
                    "version" => table.provenance.version = value.to_string(),
                    "unit" => table.unit = RateUnit::parse(value).ok_or_else(|| bad(ln, "bad unit"))?,
                    "void" => table.void = value.parse().map_err(|_| bad(ln, "bad void marker"))?,
                    "warning" => table.warnings.push(value.to_string()),
                    "note" => table.notes.push(value.to_string()),
                    "flag" => {
                        let (status, rest) = value.split_once(' ').ok_or_else(|| bad(ln, "bad flag"))?;
                        let (name, detail) = rest.split_once(" | ").ok_or_else(|| bad(ln, "bad flag"))?;
                        table.flags.push(Flag { name: name.to_string(), ok: status == "ok", detail: detail.to_string() });
                    }
                    _ => {}
                }
            } else if !header_seen {
                let mut names = line.split(',');
                if names.next() != Some("R") {
                    return Err(bad(ln, "header must start with R"));
                }
                table.columns = names.map(|n| Column { name: n.to_string(), values: Vec::new() }).collect();
                header_seen = true;
            } else if !line.is_empty() {
                let mut cells = line.split(',').map(|c| c.parse::<f64>().map_err(|_| bad(ln, "bad number")));
                table.rates.push(cells.next().ok_or_else(|| bad(ln, "empty row"))??);
                for c in &mut table.columns {
                    c.values.push(cells.next().ok_or_else(|| bad(ln, "short row"))??);
                }
                if cells.next().is_some() {
                    return Err(bad(ln, "long row"));
                }
            }
        }
        if !header_seen {
            return Err(bad(text.lines().count(), "missing header"));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CurveTable {
        CurveTable {
            unit: RateUnit::Nats,
            rates: vec![0.1, 0.2 + 1e-17, std::f64::consts::PI / 7.0],
            columns: vec![
                Column { name: "E_sp".into(), values: vec![0.3, 1.0 / 3.0, 0.0] },
                Column { name: "E_r".into(), values: vec![f64::INFINITY, 5e-324, 0.12345678901234567] },
            ],
            warnings: vec!["E_sp: tilt search hit the cap at R=0.1".into()],
            notes: vec!["E_sl_sp: tangent at R*=0.1".into()],
            flags: vec![Flag { name: "E_r <= E_sp + 1e-3".into(), ok: false, detail: "worst excess 1e300".into() }],
            void: true,
            provenance: Provenance { config_hash: "ab12".into(), seed: 9, version: "0.1.0".into() },
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let t = sample();
        let back = CurveTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        for (a, b) in back.columns.iter().flat_map(|c| &c.values).zip(t.columns.iter().flat_map(|c| &c.values)) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn bits_are_nats_over_log_two() {
        let t = sample();
        let b = t.in_unit(RateUnit::Bits);
        for (x, y) in t.rates.iter().zip(&b.rates) {
            assert_eq!(*y, x / std::f64::consts::LN_2);
        }
        for (cn, cb) in t.columns.iter().zip(&b.columns) {
            for (x, y) in cn.values.iter().zip(&cb.values) {
                assert_eq!(y.to_bits(), (x / std::f64::consts::LN_2).to_bits());
            }
        }
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(CurveTable::from_csv("R,E_sp\n0.1\n").is_err());
        assert!(CurveTable::from_csv("# unit: nats\n").is_err());
    }
}
