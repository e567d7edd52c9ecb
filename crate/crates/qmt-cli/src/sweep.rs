//! Family sweep: one CSV per quantity over a lambda grid, with projective
//! reference columns.
//!
//! Each file has a `lambda` column, one column per (k, l) pair, and
//! reference columns `P1..Pd` for the projective measurements of each rank.
//! Interior rows come from the family's closed forms; the endpoint rows
//! lambda = 0 and lambda = 1 are stitched from the projective values. For
//! pairs with k + l = d the lambda = 1 point is the identity operation,
//! where the efficiencies are filled with their analytic limits (the
//! reference column for rank d is named `Pd_limit` for the same reason).

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qmt::example_class::{
    fidelity_ex, information_ex, projective, reversibility_ex, ExampleParams, IdentityExpansion,
};
use qmt::quantities::OutcomeReport;

use crate::output::{fmt_opt, fmt_sci, write_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    pub k: usize,
    pub l: usize,
}

/// Parses `"k:l,k:l,..."`.
pub fn parse_pairs(text: &str, d: usize) -> Result<Vec<Pair>, String> {
    let mut pairs = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        let (k, l) = tok
            .split_once(':')
            .ok_or_else(|| format!("pair {tok:?} is not of the form k:l"))?;
        let k: usize = k.trim().parse().map_err(|_| format!("bad k in {tok:?}"))?;
        let l: usize = l.trim().parse().map_err(|_| format!("bad l in {tok:?}"))?;
        if k == 0 || l == 0 || k + l > d {
            return Err(format!("pair {k}:{l} invalid for d = {d}"));
        }
        pairs.push(Pair { k, l });
    }
    if pairs.is_empty() {
        return Err("no pairs given".into());
    }
    Ok(pairs)
}

/// Every valid (k, l) for the dimension, in lexicographic order.
pub fn all_pairs(d: usize) -> Vec<Pair> {
    let mut pairs = Vec::new();
    for k in 1..d {
        for l in 1..=(d - k) {
            pairs.push(Pair { k, l });
        }
    }
    pairs
}

struct PointValues {
    info: f64,
    fid: f64,
    rev: f64,
    eff_f: Option<f64>,
    eff_r: Option<f64>,
}

fn family_point(d: usize, pair: Pair, lambda: f64) -> PointValues {
    let p = ExampleParams::new(d, pair.k, pair.l, lambda).expect("validated grid point");
    let info = information_ex(&p);
    let fid = fidelity_ex(&p);
    let rev = reversibility_ex(&p);
    PointValues {
        info,
        fid,
        rev,
        eff_f: (fid < 1.0).then(|| info / (1.0 - fid)),
        eff_r: (rev < 1.0).then(|| info / (1.0 - rev)),
    }
}

fn projective_point(rep: &OutcomeReport) -> PointValues {
    PointValues {
        info: rep.info_bits,
        fid: rep.fidelity,
        rev: rep.reversibility,
        eff_f: rep.eff_fidelity,
        eff_r: rep.eff_reversibility,
    }
}

/// Endpoint values: lambda = 0 is the rank-k projective measurement,
/// lambda = 1 the rank-(k+l) one; at k + l = d the latter is the identity
/// and the efficiencies take their limits.
fn endpoint(d: usize, pair: Pair, upper: bool) -> PointValues {
    let rank = if upper { pair.k + pair.l } else { pair.k };
    let rep = projective(d, rank).expect("valid rank");
    let mut values = projective_point(&rep);
    if upper && rank == d {
        values.eff_f = Some(IdentityExpansion::eff_fidelity_limit(d));
        values.eff_r = Some(IdentityExpansion::eff_reversibility_limit());
    }
    values
}

pub struct SweepFiles {
    pub paths: Vec<PathBuf>,
}

/// Runs the sweep and writes `information.csv`, `fidelity.csv`,
/// `reversibility.csv`, `eff_fidelity.csv`, and `eff_reversibility.csv`
/// into `out_dir`.
pub fn run_sweep(
    d: usize,
    pairs: &[Pair],
    grid: usize,
    out_dir: &Path,
) -> std::io::Result<SweepFiles> {
    assert!(grid >= 2, "grid must have at least the two endpoints");
    std::fs::create_dir_all(out_dir)?;

    let rows: Vec<(f64, Vec<PointValues>)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let lambda = i as f64 / (grid - 1) as f64;
            let values = pairs
                .iter()
                .map(|&pair| {
                    if i == 0 {
                        endpoint(d, pair, false)
                    } else if i == grid - 1 {
                        endpoint(d, pair, true)
                    } else {
                        family_point(d, pair, lambda)
                    }
                })
                .collect();
            (lambda, values)
        })
        .collect();

    let proj: Vec<OutcomeReport> = (1..=d)
        .map(|r| projective(d, r).expect("valid rank"))
        .collect();
    let proj_values: Vec<PointValues> = proj.iter().map(projective_point).collect();
    // the rank-d reference is the identity: report the efficiency limits
    let ident_eff_f = IdentityExpansion::eff_fidelity_limit(d);
    let ident_eff_r = IdentityExpansion::eff_reversibility_limit();

    let mut header: Vec<String> = vec!["lambda".to_string()];
    header.extend(pairs.iter().map(|p| format!("k{}_l{}", p.k, p.l)));
    let mut proj_header: Vec<String> = (1..=d).map(|r| format!("P{r}")).collect();
    let mut eff_proj_header = proj_header.clone();
    eff_proj_header[d - 1] = format!("P{d}_limit");
    header.extend(proj_header.drain(..));
    let mut eff_header: Vec<String> = vec!["lambda".to_string()];
    eff_header.extend(pairs.iter().map(|p| format!("k{}_l{}", p.k, p.l)));
    eff_header.extend(eff_proj_header);

    let quantity = |select: &dyn Fn(&PointValues) -> String,
                    proj_cell: &dyn Fn(usize) -> String|
     -> Vec<Vec<String>> {
        rows.iter()
            .map(|(lambda, values)| {
                let mut row = vec![fmt_sci(*lambda)];
                row.extend(values.iter().map(|v| select(v)));
                row.extend((0..d).map(|r| proj_cell(r)));
                row
            })
            .collect()
    };

    let files = [
        (
            "information.csv",
            &header,
            quantity(&|v| fmt_sci(v.info), &|r| fmt_sci(proj_values[r].info)),
        ),
        (
            "fidelity.csv",
            &header,
            quantity(&|v| fmt_sci(v.fid), &|r| fmt_sci(proj_values[r].fid)),
        ),
        (
            "reversibility.csv",
            &header,
            quantity(&|v| fmt_sci(v.rev), &|r| fmt_sci(proj_values[r].rev)),
        ),
        (
            "eff_fidelity.csv",
            &eff_header,
            quantity(&|v| fmt_opt(v.eff_f), &|r| {
                if r == d - 1 {
                    fmt_sci(ident_eff_f)
                } else {
                    fmt_opt(proj_values[r].eff_f)
                }
            }),
        ),
        (
            "eff_reversibility.csv",
            &eff_header,
            quantity(&|v| fmt_opt(v.eff_r), &|r| {
                if r == d - 1 {
                    fmt_sci(ident_eff_r)
                } else {
                    fmt_opt(proj_values[r].eff_r)
                }
            }),
        ),
    ];

    let mut paths = Vec::new();
    for (name, header, rows) in files {
        let path = out_dir.join(name);
        write_csv(&path, header, &rows)?;
        paths.push(path);
    }
    Ok(SweepFiles { paths })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parsing() {
        let pairs = parse_pairs("1:1, 2:1,1:3", 4).unwrap();
        assert_eq!(
            pairs,
            vec![
                Pair { k: 1, l: 1 },
                Pair { k: 2, l: 1 },
                Pair { k: 1, l: 3 }
            ]
        );
        assert!(parse_pairs("0:1", 4).is_err());
        assert!(parse_pairs("2:3", 4).is_err());
        assert!(parse_pairs("21", 4).is_err());
    }

    #[test]
    fn all_pairs_count() {
        // d=4: k+l <= 4 with k,l >= 1 gives 6 pairs
        assert_eq!(all_pairs(4).len(), 6);
    }
}
