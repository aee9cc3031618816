//! Expansion-vs-exact comparison tables with CSV output.
//!
//! One row per (n, eps). Cells whose precondition fails (e.g. the
//! third-order variable-length form at eps = 0) stay empty. All reals print
//! at 17 significant digits; eps echoes as an exact rational.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::asymptotics::{self, MdConvention};
use crate::bignum::{big_log2, format_rational, parse_rational, ratio_f64};
use crate::error::{Error, Result};
use crate::exact::LevelDistribution;
use crate::source::{DiscreteSource, InfoMoments};

pub const TABLE_HEADER: &str = "n,eps,L_exact,vl2,vl3,rem2,rem3,log2_M_exact,fl3,md3_bits_paper,md3_nats_conv,rem_md_paper,rem_md_conv,eta_exact_bits,eta_md";

/// One eps entry of a sweep: a fixed rational or a per-n generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpsItem {
    Fixed(BigRational),
    /// "1/n"
    RecipN,
    /// "1-1/n"
    OneMinusRecipN,
}

impl EpsItem {
    pub fn eval(&self, n: u32) -> BigRational {
        match self {
            EpsItem::Fixed(r) => r.clone(),
            EpsItem::RecipN => BigRational::new(1.into(), (n as i64).into()),
            EpsItem::OneMinusRecipN => {
                BigRational::one() - BigRational::new(1.into(), (n as i64).into())
            }
        }
    }
}

/// Parses a comma-separated eps spec: rationals/decimals plus the
/// generators "1/n" and "1-1/n".
pub fn parse_eps_items(text: &str) -> Result<Vec<EpsItem>> {
    let mut items = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let item = match tok {
            "1/n" => EpsItem::RecipN,
            "1-1/n" => EpsItem::OneMinusRecipN,
            other => {
                let r = parse_rational(other)?;
                if r.is_negative() || r > BigRational::one() {
                    return Err(Error::EpsOutOfRange(other.to_string()));
                }
                EpsItem::Fixed(r)
            }
        };
        items.push(item);
    }
    if items.is_empty() {
        return Err(Error::Usage("empty eps list".into()));
    }
    Ok(items)
}

/// Parses an n spec: "a..b", "a..b:step", or a comma-separated list.
pub fn parse_n_list(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    let bad = || Error::Usage(format!("cannot parse n spec {text:?}"));
    if let Some((range, step)) = split_range(text) {
        let (a, b) = range;
        let step = step.unwrap_or(1);
        if step == 0 || a == 0 || b < a {
            return Err(bad());
        }
        return Ok((a..=b).step_by(step as usize).collect());
    }
    let mut ns = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let n: u32 = tok.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        ns.push(n);
    }
    if ns.is_empty() {
        return Err(bad());
    }
    Ok(ns)
}

fn split_range(text: &str) -> Option<((u32, u32), Option<u32>)> {
    let (range, step) = match text.split_once(':') {
        Some((r, s)) => (r, Some(s.trim().parse().ok()?)),
        None => (text, None),
    };
    let (a, b) = range.split_once("..")?;
    Some(((a.trim().parse().ok()?, b.trim().parse().ok()?), step))
}

/// Computed cells of one table row.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub n: u32,
    pub eps: BigRational,
    pub l_exact: f64,
    pub vl2: f64,
    pub vl3: Option<f64>,
    pub log2_m_exact: Option<f64>,
    pub fl3: Option<f64>,
    pub md3_bits_paper: Option<f64>,
    pub md3_nats_conv: Option<f64>,
    pub eta_exact_bits: Option<f64>,
    pub eta_md: Option<f64>,
}

/// Evaluates every column for one (n, eps).
pub fn compute_row(
    moments: &InfoMoments,
    levels: &LevelDistribution,
    eps: &BigRational,
) -> Result<TableRow> {
    let n = levels.n();
    let eps_f = ratio_f64(eps);
    let interior = !eps.is_zero() && !eps.is_one();
    let has_skew = moments.skew_sixth.is_some();

    let l_exact = ratio_f64(&levels.l_star(eps)?);
    let vl2 = asymptotics::vl_second_order(moments, n as u64, eps_f)?;
    let vl3 = (!eps.is_zero())
        .then(|| asymptotics::vl_third_order(moments, n as u64, eps_f))
        .transpose()?;
    let m_star = levels.m_star(eps)?;
    let log2_m_exact = (!m_star.is_zero()).then(|| big_log2(&m_star));
    let fl3 = interior
        .then(|| asymptotics::fl_third_order(moments, n as u64, eps_f))
        .transpose()?;
    let md = |conv| asymptotics::fl_md_expansion(moments, n as u64, eps_f, conv);
    let md3_bits_paper = (interior && has_skew)
        .then(|| md(MdConvention::BitsPaper))
        .transpose()?;
    let md3_nats_conv = (interior && has_skew)
        .then(|| md(MdConvention::NatsConverted))
        .transpose()?;
    let eta_exact_bits = interior
        .then(|| levels.eta_quantile(eps).map(|e| e / std::f64::consts::LN_2))
        .transpose()?;
    let eta_md = (interior && has_skew)
        .then(|| asymptotics::eta_md_expansion(moments, n as u64, eps_f))
        .transpose()?;

    Ok(TableRow {
        n,
        eps: eps.clone(),
        l_exact,
        vl2,
        vl3,
        log2_m_exact,
        fl3,
        md3_bits_paper,
        md3_nats_conv,
        eta_exact_bits,
        eta_md,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

impl TableRow {
    /// Renders the row in the fixed column order of `TABLE_HEADER`.
    pub fn to_csv(&self) -> String {
        let rem2 = Some(self.l_exact - self.vl2);
        let rem3 = self.vl3.map(|v| self.l_exact - v);
        let rem_md_paper = match (self.log2_m_exact, self.md3_bits_paper) {
            (Some(m), Some(e)) => Some(m - e),
            _ => None,
        };
        let rem_md_conv = match (self.log2_m_exact, self.md3_nats_conv) {
            (Some(m), Some(e)) => Some(m - e),
            _ => None,
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            format_rational(&self.eps),
            cell(Some(self.l_exact)),
            cell(Some(self.vl2)),
            cell(self.vl3),
            cell(rem2),
            cell(rem3),
            cell(self.log2_m_exact),
            cell(self.fl3),
            cell(self.md3_bits_paper),
            cell(self.md3_nats_conv),
            cell(rem_md_paper),
            cell(rem_md_conv),
            cell(self.eta_exact_bits),
            cell(self.eta_md),
        )
    }
}

/// Outcome of a table sweep: CSV lines (header first), stderr-style
/// warnings, and row accounting for the exit code logic.
#[derive(Debug, Clone)]
pub struct TableOutcome {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub rows_written: usize,
    pub rows_skipped: usize,
}

/// Runs the sweep. Budget overruns skip the affected blocklength with a
/// warning and the sweep continues; the partial CSV stays valid.
pub fn build_table(
    src: &DiscreteSource,
    n_list: &[u32],
    eps_items: &[EpsItem],
    budget: u64,
) -> Result<TableOutcome> {
    let moments = src.info_moments();
    let mut out = TableOutcome {
        lines: vec![TABLE_HEADER.to_string()],
        warnings: Vec::new(),
        rows_written: 0,
        rows_skipped: 0,
    };
    for &n in n_list {
        let levels = match LevelDistribution::enumerate(src, n, budget) {
            Ok(l) => l,
            Err(e @ Error::BudgetExceeded { .. }) => {
                out.warnings.push(format!("n = {n}: skipped ({e})"));
                out.rows_skipped += eps_items.len();
                continue;
            }
            Err(e) => return Err(e),
        };
        for item in eps_items {
            let eps = item.eval(n);
            match compute_row(&moments, &levels, &eps) {
                Ok(row) => {
                    out.lines.push(row.to_csv());
                    out.rows_written += 1;
                }
                Err(e) => {
                    out.warnings
                        .push(format!("n = {n}, eps = {eps}: skipped ({e})"));
                    out.rows_skipped += 1;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::DEFAULT_BUDGET;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eps_spec_parsing() {
        let items = parse_eps_items("0,0.5,1/n,1-1/n,3/4").unwrap();
        assert_eq!(items.len(), 5);
        assert_eq!(items[2], EpsItem::RecipN);
        assert_eq!(items[3], EpsItem::OneMinusRecipN);
        assert_eq!(items[2].eval(8), rat(1, 8));
        assert_eq!(items[3].eval(8), rat(7, 8));
        assert!(parse_eps_items("1.5").is_err());
        assert!(parse_eps_items("").is_err());
    }

    #[test]
    fn n_spec_parsing() {
        assert_eq!(parse_n_list("1,2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_list("2..6:2").unwrap(), vec![2, 4, 6]);
        assert_eq!(parse_n_list("5..7").unwrap(), vec![5, 6, 7]);
        assert!(parse_n_list("0..3").is_err());
        assert!(parse_n_list("x").is_err());
        assert!(parse_n_list("3..1").is_err());
    }

    #[test]
    fn row_hand_values() {
        let src = DiscreteSource::bernoulli(rat(1, 4)).unwrap();
        let m = src.info_moments();
        let ld = LevelDistribution::enumerate(&src, 1, DEFAULT_BUDGET).unwrap();
        // L_exact at (n=1, eps=0) is 1/4
        let row = compute_row(&m, &ld, &rat(0, 1)).unwrap();
        assert!((row.l_exact - 0.25).abs() < 1e-15);
        assert!(row.vl3.is_none());
        assert!(row.fl3.is_none());
        // eps = 1 rows: everything zero or empty
        let row = compute_row(&m, &ld, &rat(1, 1)).unwrap();
        assert_eq!(row.l_exact, 0.0);
        assert_eq!(row.vl2, 0.0);
        assert_eq!(row.vl3, Some(0.0));
        assert!(row.log2_m_exact.is_none());
    }

    #[test]
    fn csv_shape_and_rem_columns() {
        let src = DiscreteSource::bernoulli(rat(3, 10)).unwrap();
        let out = build_table(
            &src,
            &[1, 2],
            &parse_eps_items("0,1/4,1").unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(out.lines[0], TABLE_HEADER);
        assert_eq!(out.rows_written, 6);
        assert_eq!(out.lines.len(), 7);
        for line in &out.lines[1..] {
            assert_eq!(line.matches(',').count(), TABLE_HEADER.matches(',').count());
        }
        // rem3 = L_exact - vl3 by column arithmetic
        let fields: Vec<&str> = out.lines[2].split(',').collect();
        let l: f64 = fields[2].parse().unwrap();
        let vl3: f64 = fields[4].parse().unwrap();
        let rem3: f64 = fields[6].parse().unwrap();
        assert!((rem3 - (l - vl3)).abs() < 1e-12);
    }

    #[test]
    fn table_skips_over_budget_rows() {
        let src = DiscreteSource::from_probs(vec![rat(1, 4); 4]).unwrap();
        let out = build_table(
            &src,
            &[2, 50],
            &parse_eps_items("1/2").unwrap(),
            100,
        )
        .unwrap();
        assert_eq!(out.rows_written, 1);
        assert_eq!(out.rows_skipped, 1);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = cell(Some(0.8112781244591328));
        assert_eq!(s, "8.1127812445913283e-1");
    }
}
