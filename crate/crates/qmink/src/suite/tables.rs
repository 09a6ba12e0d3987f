use super::Params;
use crate::conformal_geometry::{
    components, decompose_su22, from_real_components, momentum_j_lambda, observables_tube,
    MomentumMethod,
};
use crate::fock_basis::{Basis, BasisIndex, Truncation};
use crate::ladder_operators::{
    comm_a11_diag_closed, sigma_a, trace_defect_diag_closed, trace_defect_matrix, LadderSet, Ordering,
};
use crate::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fmt::Write;

/// Tables written by [`emit_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Trdiag,
    SigmaA,
    Commdiag,
    Observables,
    Basis,
}

impl TableKind {
    pub const ALL: [TableKind; 5] = [
        TableKind::Trdiag,
        TableKind::SigmaA,
        TableKind::Commdiag,
        TableKind::Observables,
        TableKind::Basis,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Trdiag => "trdiag",
            TableKind::SigmaA => "sigma_a",
            TableKind::Commdiag => "commdiag",
            TableKind::Observables => "observables",
            TableKind::Basis => "basis",
        }
    }
}

impl std::str::FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown table '{s}'")))
    }
}

struct Csv {
    out: String,
}

impl Csv {
    fn new(kind: TableKind, params: &Params, extra: &str, header: &[&str]) -> Self {
        let mut out = String::new();
        let lambda = params.lambda.map_or("default".to_string(), |l| l.to_string());
        writeln!(
            out,
            "# qmink {} table={} lambda={} seed={}{}",
            env!("CARGO_PKG_VERSION"),
            kind.as_str(),
            lambda,
            params.seed,
            extra
        )
        .expect("writing to a String");
        writeln!(out, "{}", header.join(",")).expect("writing to a String");
        Self { out }
    }

    fn row(&mut self, cells: &[String]) {
        writeln!(self.out, "{}", cells.join(",")).expect("writing to a String");
    }
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Renders a table as CSV: a provenance comment line, a header row, then data.
pub fn emit_table(kind: TableKind, params: &Params) -> Result<String> {
    params.validate()?;
    let lambda = params.lambda_or(5);
    match kind {
        TableKind::Trdiag => {
            let top = params.degree_or(6);
            // One degree of headroom keeps every listed index interior.
            let trunc = Truncation::new(top + 1);
            let basis = Basis::enumerate(trunc);
            let anti = trace_defect_matrix(lambda, trunc, Ordering::AntiNormal)?;
            let normal = trace_defect_matrix(lambda, trunc, Ordering::Normal)?;
            let mut csv = Csv::new(
                kind,
                params,
                &format!(" resolved_lambda={lambda} max_degree={top}"),
                &["j", "m", "closed_form", "antinormal_matrix", "normal_matrix", "abs_diff"],
            );
            for two_j in 0..=top {
                for m in 0..=(top - two_j) / 2 {
                    let idx = BasisIndex::new(two_j, m, two_j as i32, two_j as i32)?;
                    let pos = basis.index_lookup(&idx).ok_or(Error::TruncationMismatch)?;
                    let closed = trace_defect_diag_closed(lambda, &idx);
                    let a = anti.get(pos, pos).re;
                    csv.row(&[
                        num(idx.j()),
                        m.to_string(),
                        num(closed),
                        num(a),
                        num(normal.get(pos, pos).re),
                        num((a - closed).abs()),
                    ]);
                }
            }
            Ok(csv.out)
        }
        TableKind::SigmaA => {
            let mut csv = Csv::new(
                kind,
                params,
                &format!(" resolved_lambda={lambda} m_max={}", params.m_max),
                &["m", "sigma_a"],
            );
            let values = sigma_a(lambda, params.m_max);
            for (m, v) in values.iter().enumerate() {
                let label = if m as u32 > params.m_max { "inf".to_string() } else { m.to_string() };
                csv.row(&[label, num(*v)]);
            }
            Ok(csv.out)
        }
        TableKind::Commdiag => {
            let trunc = Truncation::new(params.degree_or(8));
            let ladders = LadderSet::new(lambda, trunc);
            let comm = ladders.creator(1, 1)?.commutator(ladders.annihilator(1, 1)?)?;
            let mut csv = Csv::new(
                kind,
                params,
                &format!(" resolved_lambda={lambda} max_degree={}", trunc.max_degree),
                &["two_j", "m", "two_j1", "two_j2", "closed_form", "matrix", "abs_diff"],
            );
            let basis = ladders.basis();
            for (pos, idx) in basis.indices().iter().enumerate() {
                if !basis.is_interior(idx, 1) {
                    continue;
                }
                let closed = comm_a11_diag_closed(lambda, idx);
                let value = comm.get(pos, pos).re;
                csv.row(&[
                    idx.two_j().to_string(),
                    idx.m().to_string(),
                    idx.two_j1().to_string(),
                    idx.two_j2().to_string(),
                    num(closed),
                    num(value),
                    num((value - closed).abs()),
                ]);
            }
            Ok(csv.out)
        }
        TableKind::Observables => {
            let lam = lambda.as_f64();
            let mut header = vec!["k".to_string()];
            for mu in 0..4 {
                header.push(format!("w{mu}_re"));
                header.push(format!("w{mu}_im"));
            }
            header.extend((0..4).map(|mu| format!("p_{mu}")));
            for mu in 0..4 {
                for nu in mu + 1..4 {
                    header.push(format!("m_{mu}{nu}"));
                }
            }
            header.push("d".into());
            header.extend((0..4).map(|mu| format!("a_{mu}")));
            header.push("decomposition_max_abs_diff".into());
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut csv = Csv::new(
                kind,
                params,
                &format!(" resolved_lambda={lambda} rows={}", params.rows),
                &header,
            );
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let mut normal = || -> f64 { rng.sample(StandardNormal) };
            for k in 0..params.rows {
                let x: [f64; 4] = std::array::from_fn(|_| normal());
                let mut y: [f64; 4] = std::array::from_fn(|_| normal());
                y[0] = (y[1] * y[1] + y[2] * y[2] + y[3] * y[3]).sqrt() + 0.1 + normal().abs();
                let w = from_real_components(&x) + from_real_components(&y) * Complex64::new(0.0, 1.0);
                let closed = observables_tube(&w, lam)?;
                let decomposed = decompose_su22(&momentum_j_lambda(&w, lam, MomentumMethod::Block)?)?;
                let mut cells = vec![k.to_string()];
                for c in components(&w) {
                    cells.push(num(c.re));
                    cells.push(num(c.im));
                }
                cells.extend(closed.p.iter().map(|v| num(*v)));
                for mu in 0..4 {
                    for nu in mu + 1..4 {
                        cells.push(num(closed.m[mu][nu]));
                    }
                }
                cells.push(num(closed.d));
                cells.extend(closed.a.iter().map(|v| num(*v)));
                cells.push(num(decomposed.max_abs_diff(&closed)));
                csv.row(&cells);
            }
            Ok(csv.out)
        }
        TableKind::Basis => {
            let trunc = Truncation::new(params.degree_or(8));
            let basis = Basis::enumerate(trunc);
            let mut csv = Csv::new(
                kind,
                params,
                &format!(" max_degree={}", trunc.max_degree),
                &["pos", "two_j", "m", "two_j1", "two_j2", "degree"],
            );
            for (pos, idx) in basis.indices().iter().enumerate() {
                csv.row(&[
                    pos.to_string(),
                    idx.two_j().to_string(),
                    idx.m().to_string(),
                    idx.two_j1().to_string(),
                    idx.two_j2().to_string(),
                    idx.degree().to_string(),
                ]);
            }
            Ok(csv.out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data_rows(csv: &str) -> usize {
        csv.lines().count() - 2
    }

    #[test]
    fn basis_table_row_count() {
        let p = Params {
            max_degree: Some(8),
            ..Params::default()
        };
        let csv = emit_table(TableKind::Basis, &p).unwrap();
        assert!(csv.starts_with("# qmink"));
        assert_eq!(data_rows(&csv), 495);
    }

    #[test]
    fn sigma_a_rows() {
        let p = Params {
            lambda: Some(4),
            ..Params::default()
        };
        let csv = emit_table(TableKind::SigmaA, &p).unwrap();
        assert_eq!(data_rows(&csv), 12);
        assert!(csv.trim_end().ends_with("inf,0.0"));
    }

    #[test]
    fn trdiag_matches_closed_form() {
        let p = Params {
            lambda: Some(4),
            max_degree: Some(6),
            ..Params::default()
        };
        let csv = emit_table(TableKind::Trdiag, &p).unwrap();
        for line in csv.lines().skip(2) {
            let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(diff < 1e-12, "{line}");
        }
    }

    #[test]
    fn tables_are_deterministic() {
        let p = Params::default();
        for kind in TableKind::ALL {
            assert_eq!(emit_table(kind, &p).unwrap(), emit_table(kind, &p).unwrap());
        }
    }
}
