//! Initial comprehension distribution `F` and its survival function.
//!
//! Two kinds are supported: the analytic uniform law on `[0, 1]` and a
//! continuous piecewise-linear CDF given by a knot table. Both are
//! immutable once built.

use std::fmt;

use crate::Error;

/// The initial distribution `F` from which every session threshold is read.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDistribution {
    /// `F(x) = clamp(x, 0, 1)`.
    Uniform01,
    /// Piecewise-linear CDF through validated knots.
    Table(CdfTable),
}

/// Knots `(x, F(x))` of a continuous piecewise-linear CDF.
///
/// The x-values are strictly increasing, the F-values are nondecreasing and
/// run from exactly 0 to exactly 1, so the CDF is 0 left of the first knot
/// and 1 right of the last.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    knots: Vec<(f64, f64)>,
}

impl CdfTable {
    /// Builds a table from knots, rejecting anything that is not a complete,
    /// continuous CDF.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, Error> {
        Self::check(&knots, |i| i + 1)?;
        Ok(Self { knots })
    }

    // `line_of` maps a knot index to the line number reported in errors.
    fn check(knots: &[(f64, f64)], line_of: impl Fn(usize) -> usize) -> Result<(), Error> {
        let parse = |line, message: String| Err(Error::Parse { line, message });
        if knots.len() < 2 {
            return parse(
                knots.len().checked_sub(1).map_or(0, &line_of),
                format!("a CDF table needs at least 2 knots, found {}", knots.len()),
            );
        }
        for (i, &(x, fx)) in knots.iter().enumerate() {
            if !x.is_finite() || !fx.is_finite() {
                return parse(line_of(i), "knot values must be finite".into());
            }
            if !(0.0..=1.0).contains(&fx) {
                return parse(line_of(i), format!("F(x) = {fx} lies outside [0, 1]"));
            }
            if i > 0 {
                let (px, pf) = knots[i - 1];
                if x <= px {
                    return parse(
                        line_of(i),
                        format!("x = {x} is not strictly greater than previous x = {px}"),
                    );
                }
                if fx < pf {
                    return parse(
                        line_of(i),
                        format!("F(x) = {fx} decreases from previous F(x) = {pf}"),
                    );
                }
            }
        }
        if knots[0].1 != 0.0 {
            return parse(
                line_of(0),
                format!("first F-value must be 0, found {}", knots[0].1),
            );
        }
        let last = knots.len() - 1;
        if knots[last].1 != 1.0 {
            return parse(
                line_of(last),
                format!("last F-value must be 1, found {}", knots[last].1),
            );
        }
        Ok(())
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Closed interval outside which the CDF is flat at 0 or 1.
    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        // first knot strictly right of x; lo < x < hi so 1 <= idx <= len-1
        let idx = self.knots.partition_point(|&(kx, _)| kx <= x);
        let (x0, f0) = self.knots[idx - 1];
        let (x1, f1) = self.knots[idx];
        if x == x0 {
            return f0;
        }
        f0 + (x - x0) / (x1 - x0) * (f1 - f0)
    }
}

impl InitialDistribution {
    /// `F(x)`, always in `[0, 1]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            InitialDistribution::Uniform01 => x.clamp(0.0, 1.0),
            InitialDistribution::Table(t) => t.cdf(x),
        }
    }

    /// `F̄(x) = 1 − F(x)`, computed from `cdf` so the two always sum to one.
    pub fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Interval outside which `F` is flat.
    pub fn support(&self) -> (f64, f64) {
        match self {
            InitialDistribution::Uniform01 => (0.0, 1.0),
            InitialDistribution::Table(t) => t.support(),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, InitialDistribution::Uniform01)
    }

    /// Parses a CDF table: one whitespace-separated `x F(x)` pair per line,
    /// blank lines and `#` comments ignored, LF or CRLF endings.
    pub fn load_cdf_table(text: &[u8]) -> Result<Self, Error> {
        let text = std::str::from_utf8(text).map_err(|e| Error::Parse {
            line: 0,
            message: format!("input is not UTF-8: {e}"),
        })?;
        let mut knots = Vec::new();
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(xs), Some(fs), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected two fields \"x F(x)\", got {line:?}"),
                });
            };
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("{s:?} is not a decimal number"),
                })
            };
            knots.push((num(xs)?, num(fs)?));
            lines.push(line_no);
        }
        let last_line = text.lines().count();
        CdfTable::check(&knots, |i| lines.get(i).copied().unwrap_or(last_line))?;
        Ok(InitialDistribution::Table(CdfTable { knots }))
    }
}

impl fmt::Display for InitialDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDistribution::Uniform01 => write!(f, "uniform"),
            InitialDistribution::Table(t) => write!(f, "table({} knots)", t.knots.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(knots: &[(f64, f64)]) -> InitialDistribution {
        InitialDistribution::Table(CdfTable::new(knots.to_vec()).unwrap())
    }

    #[test]
    fn uniform_values() {
        let u = InitialDistribution::Uniform01;
        assert_eq!(u.cdf(0.5), 0.5);
        assert_eq!(u.cdf(-0.2), 0.0);
        assert_eq!(u.sf(0.8), 1.0 - 0.8);
        assert!((u.sf(0.8) - 0.2).abs() < 1e-15);
        assert_eq!(u.sf(1.4), 0.0);
    }

    #[test]
    fn table_interpolates() {
        let t = table(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(t.cdf(0.3), 0.3);
        let t = table(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]);
        assert_eq!(t.sf(0.5), 0.75);
        assert_eq!(t.cdf(0.75), 0.625);
        assert_eq!(t.cdf(-3.0), 0.0);
        assert_eq!(t.cdf(7.0), 1.0);
    }

    #[test]
    fn load_accepts_comments_and_crlf() {
        let d = InitialDistribution::load_cdf_table(b"# header\r\n0 0\r\n\r\n1 1\r\n").unwrap();
        assert_eq!(d, table(&[(0.0, 0.0), (1.0, 1.0)]));
        let d = InitialDistribution::load_cdf_table(b"0 0\n5e-1 2.5E-1\n1 1").unwrap();
        assert_eq!(d, table(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]));
    }

    fn parse_err(text: &str) -> (usize, String) {
        match InitialDistribution::load_cdf_table(text.as_bytes()) {
            Err(Error::Parse { line, message }) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_malformed_tables() {
        let (line, msg) = parse_err("0 0\n0.5 0.9\n0.4 1\n");
        assert_eq!(line, 3);
        assert!(msg.contains("strictly greater"), "{msg}");

        let (line, msg) = parse_err("0 0\n1 0.8\n");
        assert_eq!(line, 2);
        assert!(msg.contains("last F-value"), "{msg}");

        let (line, _) = parse_err("# c\n0 0.1\n1 1\n");
        assert_eq!(line, 2);

        let (line, msg) = parse_err("0 0\n0.5 0.6\n0.7 0.4\n1 1\n");
        assert_eq!(line, 3);
        assert!(msg.contains("decreases"), "{msg}");

        let (_, msg) = parse_err("0 0\n1 1.5\n");
        assert!(msg.contains("outside [0, 1]"), "{msg}");

        let (_, msg) = parse_err("# only\n0 0\n");
        assert!(msg.contains("at least 2"), "{msg}");

        let (line, _) = parse_err("0 0\n0.5 abc\n1 1\n");
        assert_eq!(line, 2);

        let (line, _) = parse_err("0 0 0\n1 1\n");
        assert_eq!(line, 1);
    }

    fn arb_table() -> impl Strategy<Value = InitialDistribution> {
        (prop::collection::vec((0.01f64..1.0, 0.0f64..1.0), 0..6), -1.0f64..1.0).prop_map(
            |(steps, start)| {
                let total: f64 = steps.iter().map(|s| s.1).sum();
                let mut knots = vec![(start, 0.0)];
                let (mut x, mut acc) = (start, 0.0);
                for (dx, df) in &steps {
                    x += dx;
                    acc += df;
                    knots.push((x, if total > 0.0 { (acc / total).min(1.0) } else { 0.0 }));
                }
                knots.push((x + 0.5, 1.0));
                table(&knots)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn cdf_is_monotone(d in arb_table(), a in -2.0f64..3.0, b in -2.0f64..3.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(d.cdf(lo) <= d.cdf(hi));
            prop_assert!((0.0..=1.0).contains(&d.cdf(lo)));
        }

        #[test]
        fn cdf_and_sf_sum_to_one(d in arb_table(), x in -2.0f64..3.0) {
            prop_assert_eq!(d.cdf(x) + d.sf(x), 1.0);
            let u = InitialDistribution::Uniform01;
            prop_assert_eq!(u.cdf(x) + u.sf(x), 1.0);
        }

        #[test]
        fn identity_table_matches_uniform(x in -0.5f64..1.5) {
            let t = table(&[(0.0, 0.0), (1.0, 1.0)]);
            prop_assert!((t.cdf(x) - InitialDistribution::Uniform01.cdf(x)).abs() <= 1e-15);
        }
    }
}
