//! Comparison-table reports: rate/asymptotics of the balanced
//! multigroup families, the full decoding-cost exponent grid with base
//! labels, and the head-to-head exponent comparison against published
//! reference families.

use crate::design::Rational;
use crate::error::Result;
use crate::fd::{select_base_profile, BaseFamily, ComplexityProfile};
use crate::multigroup::rate_ag;
use std::fmt::Write as _;

/// One cell of the exponent grid.
#[derive(Debug, Clone)]
pub struct ExponentCell {
    pub n: usize,
    pub r: Rational,
    pub family: BaseFamily,
    pub profile: ComplexityProfile,
}

/// The rates tabulated per antenna count: 5/4, then the integers
/// 2..=N.
pub fn grid_rates(n: usize) -> Vec<Rational> {
    let mut rates = vec![Rational::new(5, 4)];
    rates.extend((2..=n as i64).map(|r| Rational::new(r, 1)));
    rates
}

/// Computes the 54-cell exponent grid for N = 2..10.
pub fn exponent_grid() -> Result<Vec<ExponentCell>> {
    let mut cells = Vec::new();
    for n in 2..=10usize {
        for r in grid_rates(n) {
            let (family, profile) = select_base_profile(n, r)?;
            cells.push(ExponentCell {
                n,
                r,
                family,
                profile,
            });
        }
    }
    Ok(cells)
}

fn fmt_exp(x: f64) -> String {
    if x == x.trunc() {
        format!("{x:.0}")
    } else {
        format!("{x:.1}")
    }
}

fn fmt_rate(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_text_table(header: Vec<String>, rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            if i >= widths.len() {
                widths.push(cell.len());
            } else {
                widths[i] = widths[i].max(cell.len());
            }
        }
    }
    let mut out = String::new();
    let render_row = |out: &mut String, row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<w$}", c, w = widths[i]))
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    };
    render_row(&mut out, &header);
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    let _ = writeln!(out, "{}", "-".repeat(total));
    for row in &rows {
        render_row(&mut out, row);
    }
    out
}

/// Exponent grid rendered as an aligned text table.
pub fn render_exponent_grid_text(cells: &[ExponentCell]) -> String {
    let rates = grid_rates(10);
    let mut header = vec!["N".to_string()];
    header.extend(rates.iter().map(|r| format!("R={}", fmt_rate(*r))));
    let mut rows = Vec::new();
    for n in 2..=10usize {
        let mut row = vec![n.to_string()];
        for r in &rates {
            let cell = cells.iter().find(|c| c.n == n && c.r == *r);
            row.push(match cell {
                Some(c) => format!("{} {}", fmt_exp(c.profile.exponent), c.family),
                None => String::new(),
            });
        }
        rows.push(row);
    }
    render_text_table(header, rows)
}

/// Exponent grid as CSV: N, R_num, R_den, exponent, family, mode, K, K_b.
pub fn render_exponent_grid_csv(cells: &[ExponentCell]) -> String {
    let mut out = String::from("N,R_num,R_den,exponent,family,mode,K,K_b\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.n,
            c.r.numer(),
            c.r.denom(),
            fmt_exp(c.profile.exponent),
            c.family,
            c.profile.mode,
            c.profile.k,
            c.profile.k_b
        );
    }
    out
}

/// One row of the rate-comparison table.
#[derive(Debug, Clone)]
pub struct RateFamilyRow {
    pub family: String,
    pub antennas: String,
    pub delay: String,
    pub groups: String,
    pub rate: String,
    /// Example evaluation (N, exact rate) where a closed form exists.
    pub rate_example: Option<(usize, Rational)>,
    pub asymptotic_normalized_rate: String,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Minimum decoding delay of a maximal-rate orthogonal design:
/// sigma(2m) = sigma(2m-1) = C(2m, m-1).
pub fn cod_delay_bound(n: usize) -> u64 {
    let m = n.div_ceil(2) as u64;
    binomial(2 * m, m - 1)
}

/// Maximal rate of a (generally non-square) orthogonal design for N
/// antennas: (ceil((N-1)/2) + 1) / (2 ceil((N-1)/2)), which tends
/// to 1/2.
pub fn max_cod_rate(n: usize) -> Rational {
    // ceil((N-1)/2) equals N/2 rounded down for N >= 1.
    let m = ((n as i64) / 2).max(1);
    Rational::new(m + 1, 2 * m)
}

/// Rate-comparison rows: published reference families followed by the
/// families constructed in this crate.
pub fn rate_table_rows() -> Result<Vec<RateFamilyRow>> {
    let mut rows = Vec::new();
    rows.push(RateFamilyRow {
        family: "Square COD".into(),
        antennas: "2^m".into(),
        delay: "N".into(),
        groups: "2RT".into(),
        rate: "(m+1)/2^m".into(),
        rate_example: Some((8, Rational::new(4, 8))),
        asymptotic_normalized_rate: "0".into(),
    });
    rows.push(RateFamilyRow {
        family: "Maximal-rate COD".into(),
        antennas: ">= 1".into(),
        delay: format!("at least C(2m, m-1), e.g. {} at N=8", cod_delay_bound(8)),
        groups: "2RT".into(),
        rate: "(ceil((N-1)/2)+1)/(2 ceil((N-1)/2))".into(),
        rate_example: Some((8, max_cod_rate(8))),
        asymptotic_normalized_rate: "0".into(),
    });
    rows.push(RateFamilyRow {
        family: "Single-complex-symbol decodable".into(),
        antennas: "2^m".into(),
        delay: "N".into(),
        groups: "K/2".into(),
        rate: "m/2^(m-1)".into(),
        rate_example: Some((8, Rational::new(3, 4))),
        asymptotic_normalized_rate: "0".into(),
    });
    rows.push(RateFamilyRow {
        family: "Clifford unitary weight designs".into(),
        antennas: "2^m, m >= ceil(g/2 - 1)".into(),
        delay: "N".into(),
        groups: "g".into(),
        rate: "g/2^floor((g+1)/2)".into(),
        rate_example: Some((4, Rational::new(4, 4))),
        asymptotic_normalized_rate: "0".into(),
    });
    rows.push(RateFamilyRow {
        family: "Rate-1 four-group designs".into(),
        antennas: "2m".into(),
        delay: "N".into(),
        groups: "4".into(),
        rate: "1".into(),
        rate_example: Some((8, Rational::new(1, 1))),
        asymptotic_normalized_rate: "0".into(),
    });
    rows.push(RateFamilyRow {
        family: "2-group designs for 2^m antennas".into(),
        antennas: "2^m, m >= 2".into(),
        delay: "N".into(),
        groups: "2".into(),
        rate: "N/4 + 1/N".into(),
        rate_example: Some((8, Rational::new(8, 4) + Rational::new(1, 8))),
        asymptotic_normalized_rate: "1/4".into(),
    });
    rows.push(RateFamilyRow {
        family: "Spatial-multiplexing 2-group designs".into(),
        antennas: ">= 1".into(),
        delay: ">= 2N".into(),
        groups: "2".into(),
        rate: "(NT - N^2 + 1)/T".into(),
        rate_example: Some((8, Rational::new(8 * 16 - 64 + 1, 16))),
        asymptotic_normalized_rate: "1/2 for T = 2N".into(),
    });
    for g in [2usize, 3, 4] {
        let scale = 1usize << ((g - 1) / 2);
        let example_n = g * scale * 2;
        rows.push(RateFamilyRow {
            family: format!("This crate, delay-optimal {g}-group"),
            antennas: format!("n*{scale}, n >= {g}"),
            delay: "N".into(),
            groups: g.to_string(),
            rate: "g p^2 / (N (1 + [g even])) + (g^2-g)/(2N)".into(),
            rate_example: Some((example_n, rate_ag(g, example_n)?)),
            asymptotic_normalized_rate: format!("1/{}", g * (1 << (g - 1))),
        });
    }
    for g in [2usize, 3, 4] {
        let scale = 1usize << ((g - 1) / 2);
        let n_prime = 2 * scale;
        let stacked_rate = Rational::new(n_prime as i64, 1 << (g - 1))
            + Rational::new(g as i64 - 1, 2 * n_prime as i64);
        rows.push(RateFamilyRow {
            family: format!("This crate, stacked {g}-group"),
            antennas: format!("n*{scale}, n >= 1"),
            delay: format!("{g}N"),
            groups: g.to_string(),
            rate: "N/2^(g-1) + (g-1)/(2N)".into(),
            rate_example: Some((n_prime, stacked_rate)),
            asymptotic_normalized_rate: format!("1/{}", 1 << (g - 1)),
        });
    }
    rows.push(RateFamilyRow {
        family: "Division-algebra codes".into(),
        antennas: ">= 1".into(),
        delay: "N".into(),
        groups: "1".into(),
        rate: "N".into(),
        rate_example: Some((8, Rational::new(8, 1))),
        asymptotic_normalized_rate: "1".into(),
    });
    Ok(rows)
}

pub fn render_rate_table_text(rows: &[RateFamilyRow]) -> String {
    let header = vec![
        "family".to_string(),
        "antennas".to_string(),
        "delay".to_string(),
        "groups".to_string(),
        "rate".to_string(),
        "rate at example N".to_string(),
        "asymptotic R/N".to_string(),
    ];
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.family.clone(),
                r.antennas.clone(),
                r.delay.clone(),
                r.groups.clone(),
                r.rate.clone(),
                match r.rate_example {
                    Some((n, rate)) => format!("N={}: {}", n, fmt_rate(rate)),
                    None => String::new(),
                },
                r.asymptotic_normalized_rate.clone(),
            ]
        })
        .collect();
    render_text_table(header, body)
}

pub fn render_rate_table_csv(rows: &[RateFamilyRow]) -> String {
    let mut out = String::from(
        "family,antennas,delay,groups,rate,example_N,example_rate_num,example_rate_den,asymptotic_normalized_rate\n",
    );
    for r in rows {
        let (en, ern, erd) = match r.rate_example {
            Some((n, rate)) => (
                n.to_string(),
                rate.numer().to_string(),
                rate.denom().to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{},{},{},{:?}",
            r.family,
            r.antennas,
            r.delay,
            r.groups,
            r.rate,
            en,
            ern,
            erd,
            r.asymptotic_normalized_rate
        );
    }
    out
}

/// Published decoding-cost exponents of competing code families. These
/// are reference constants quoted from the literature, never
/// recomputed here.
pub const COMPARISON_COLUMNS: [&str; 9] = [
    "GF4 FD/FGD",
    "EAST",
    "TAST",
    "SR block-FD",
    "Ren FGD",
    "MOD fast",
    "CPA FD",
    "Golden",
    "Silver",
];

/// One comparison row: the computed exponent of this crate's code and
/// the published exponents, per column, where the literature reports
/// one.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub n: usize,
    pub r: Rational,
    pub new_code: f64,
    pub published: [Option<f64>; 9],
}

/// The published comparison grid.
fn published_rows() -> Vec<(usize, Rational, [Option<f64>; 9])> {
    let r = |num, den| Rational::new(num, den);
    vec![
        (
            2,
            r(1, 1),
            [
                Some(0.0),
                Some(0.5),
                Some(0.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            2,
            r(2, 1),
            [
                Some(2.0),
                None,
                Some(2.5),
                Some(2.5),
                None,
                None,
                None,
                Some(2.5),
                Some(2.0),
            ],
        ),
        (
            4,
            r(1, 1),
            [
                Some(0.5),
                Some(1.0),
                Some(1.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            4,
            r(3, 2),
            [
                Some(2.5),
                None,
                Some(3.5),
                None,
                None,
                Some(3.0),
                None,
                None,
                None,
            ],
        ),
        (
            4,
            r(2, 1),
            [
                Some(4.5),
                Some(5.0),
                Some(5.5),
                Some(4.5),
                Some(5.5),
                None,
                Some(6.0),
                None,
                None,
            ],
        ),
        (
            4,
            r(17, 8),
            [
                Some(5.0),
                None,
                Some(6.0),
                None,
                Some(6.0),
                None,
                None,
                None,
                None,
            ],
        ),
        (
            6,
            r(1, 1),
            [
                None,
                Some(1.5),
                Some(2.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            6,
            r(2, 1),
            [
                None,
                Some(8.0),
                Some(8.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            6,
            r(3, 1),
            [
                None,
                Some(14.0),
                Some(14.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            7,
            r(1, 1),
            [None, None, Some(3.0), None, None, None, None, None, None],
        ),
        (
            7,
            r(2, 1),
            [None, None, Some(10.0), None, None, None, None, None, None],
        ),
        (
            7,
            r(3, 1),
            [None, None, Some(17.5), None, None, None, None, None, None],
        ),
        (
            8,
            r(1, 1),
            [
                Some(1.5),
                Some(2.0),
                Some(3.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            8,
            r(2, 1),
            [
                Some(9.5),
                Some(10.0),
                Some(11.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            8,
            r(3, 1),
            [
                Some(17.5),
                Some(18.0),
                Some(19.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            8,
            r(4, 1),
            [
                Some(25.5),
                Some(26.0),
                Some(27.5),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        ),
        (
            9,
            r(1, 1),
            [None, None, Some(4.0), None, None, None, None, None, None],
        ),
        (
            9,
            r(2, 1),
            [None, None, Some(13.0), None, None, None, None, None, None],
        ),
        (
            9,
            r(3, 1),
            [None, None, Some(22.0), None, None, None, None, None, None],
        ),
        (
            9,
            r(4, 1),
            [None, None, Some(31.0), None, None, None, None, None, None],
        ),
    ]
}

/// Computes the comparison table: this crate's exponent per row next to
/// the stored published constants.
pub fn comparison_rows() -> Result<Vec<ComparisonRow>> {
    published_rows()
        .into_iter()
        .map(|(n, r, published)| {
            let (_, profile) = select_base_profile(n, r)?;
            Ok(ComparisonRow {
                n,
                r,
                new_code: profile.exponent,
                published,
            })
        })
        .collect()
}

pub fn render_comparison_text(rows: &[ComparisonRow]) -> String {
    let mut header = vec!["N".to_string(), "R".to_string(), "this crate".to_string()];
    header.extend(COMPARISON_COLUMNS.iter().map(|s| s.to_string()));
    let body = rows
        .iter()
        .map(|row| {
            let mut cells = vec![row.n.to_string(), fmt_rate(row.r), fmt_exp(row.new_code)];
            cells.extend(
                row.published
                    .iter()
                    .map(|p| p.map(fmt_exp).unwrap_or_default()),
            );
            cells
        })
        .collect();
    render_text_table(header, body)
}

pub fn render_comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("N,R_num,R_den,new_code");
    for col in COMPARISON_COLUMNS {
        let _ = write!(out, ",{}", col.replace(' ', "_").replace(',', ";"));
    }
    out.push('\n');
    for row in rows {
        let _ = write!(
            out,
            "{},{},{},{}",
            row.n,
            row.r.numer(),
            row.r.denom(),
            fmt_exp(row.new_code)
        );
        for p in &row.published {
            match p {
                Some(v) => {
                    let _ = write!(out, ",{}", fmt_exp(*v));
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// All three reports, text and CSV.
#[derive(Debug, Clone)]
pub struct TableReports {
    pub rates_text: String,
    pub rates_csv: String,
    pub exponents_text: String,
    pub exponents_csv: String,
    pub comparison_text: String,
    pub comparison_csv: String,
}

/// Generates all three comparison reports.
pub fn reproduce_tables() -> Result<TableReports> {
    let rate_rows = rate_table_rows()?;
    let cells = exponent_grid()?;
    let cmp_rows = comparison_rows()?;
    Ok(TableReports {
        rates_text: render_rate_table_text(&rate_rows),
        rates_csv: render_rate_table_csv(&rate_rows),
        exponents_text: render_exponent_grid_text(&cells),
        exponents_csv: render_exponent_grid_csv(&cells),
        comparison_text: render_comparison_text(&cmp_rows),
        comparison_csv: render_comparison_csv(&cmp_rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_54_cells() {
        let cells = exponent_grid().unwrap();
        assert_eq!(cells.len(), 54);
    }

    #[test]
    fn spot_check_cells() {
        let cells = exponent_grid().unwrap();
        let cell = |n: usize, r: Rational| {
            cells
                .iter()
                .find(|c| c.n == n && c.r == r)
                .expect("cell exists")
        };
        let c = cell(10, Rational::new(10, 1));
        assert_eq!(c.profile.exponent, 86.5);
        assert_eq!(c.family, BaseFamily::Ag(2));
        let c = cell(2, Rational::new(5, 4));
        assert_eq!(c.profile.exponent, 0.5);
        assert_eq!(c.family, BaseFamily::Fgd);
    }

    #[test]
    fn comparison_contains_reference_case() {
        let rows = comparison_rows().unwrap();
        let row = rows
            .iter()
            .find(|row| row.n == 6 && row.r == Rational::new(3, 1))
            .unwrap();
        assert_eq!(row.new_code, 12.5);
        let tast_idx = COMPARISON_COLUMNS
            .iter()
            .position(|c| *c == "TAST")
            .unwrap();
        assert_eq!(row.published[tast_idx], Some(14.5));
    }

    #[test]
    fn delay_bound_values() {
        assert_eq!(cod_delay_bound(4), 4); // C(4, 1)
        assert_eq!(cod_delay_bound(8), 56); // C(8, 3)
        assert_eq!(cod_delay_bound(7), 56);
    }

    #[test]
    fn reports_render() {
        let reports = reproduce_tables().unwrap();
        assert!(reports.exponents_text.contains("86.5 F_2AG"));
        assert!(reports.exponents_csv.lines().count() == 55);
        assert!(reports.rates_text.contains("1/2 for T = 2N"));
        assert!(reports.comparison_csv.starts_with("N,R_num,R_den,new_code"));
    }

    #[test]
    fn stacked_two_group_row_has_half_normalized_rate() {
        let rows = rate_table_rows().unwrap();
        let row = rows
            .iter()
            .find(|r| r.family.contains("stacked 2-group"))
            .unwrap();
        assert_eq!(row.asymptotic_normalized_rate, "1/2");
        assert_eq!(row.delay, "2N");
    }
}
