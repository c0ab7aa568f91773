//! CSV rows and JSON summaries for sample records.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::stats::{ks_distance, EmpiricalDistribution};
use super::{GcdPairTable, SampleRecord};
use crate::analytic::{DensityCdf, MEAN_T};
use crate::error::{Error, Result};
use crate::SCHEMA_TAG;

/// One CSV row. Missing statistics are empty fields; the window is a
/// space-separated list of quotients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub a1: u64,
    pub a2: u64,
    pub a3: u64,
    #[serde(rename = "F")]
    pub frobenius: Option<i64>,
    #[serde(rename = "fN")]
    pub f_n: Option<f64>,
    pub t: Option<f64>,
    pub k1: u64,
    pub k2: u64,
    pub s1: Option<usize>,
    pub q_ratio: Option<f64>,
    pub h_window: String,
}

impl From<&SampleRecord> for SampleRow {
    fn from(r: &SampleRecord) -> Self {
        SampleRow {
            a1: r.a[0],
            a2: r.a[1],
            a3: r.a[2],
            frobenius: r.frobenius,
            f_n: r.f_n,
            t: r.t,
            k1: r.k1,
            k2: r.k2,
            s1: r.s1,
            q_ratio: r.q_ratio,
            h_window: r
                .window
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

/// Writes `# frobenius-limit v1`, the header and one row per record.
pub fn write_records_csv<W: Write>(mut out: W, records: &[SampleRecord]) -> Result<()> {
    writeln!(out, "# {SCHEMA_TAG}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(SampleRow::from(r))?;
    }
    if records.is_empty() {
        w.write_record([
            "a1", "a2", "a3", "F", "fN", "t", "k1", "k2", "s1", "q_ratio", "h_window",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_records_csv`]; `#` lines are skipped.
pub fn read_rows_csv<R: Read>(input: R) -> Result<Vec<SampleRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<SampleRow>, _>>()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistSummary {
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean.
    pub mean_se: f64,
    pub std_dev: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl DistSummary {
    pub fn of(emp: &EmpiricalDistribution) -> Self {
        DistSummary {
            count: emp.count(),
            mean: emp.mean(),
            mean_se: emp.std_dev() / (emp.count() as f64).sqrt(),
            std_dev: emp.std_dev(),
            min: emp.quantile(0.0),
            q25: emp.quantile(0.25),
            median: emp.quantile(0.5),
            q75: emp.quantile(0.75),
            max: emp.quantile(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcdPairFrequency {
    pub k1: u64,
    pub k2: u64,
    pub count: u64,
    pub frequency: f64,
}

/// Distribution summaries of a sample, written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub schema: u32,
    pub rows: usize,
    pub t: Option<DistSummary>,
    pub f_n: Option<DistSummary>,
    pub q_ratio: Option<DistSummary>,
    /// `8/pi`, the limiting mean of `t`.
    pub t_mean_limit: f64,
    /// KS distance between the `t` sample and the limiting density.
    pub ks_t_vs_density: Option<f64>,
    pub gcd_pairs: Vec<GcdPairFrequency>,
}

fn summary_of(values: Vec<f64>) -> Option<(DistSummary, EmpiricalDistribution)> {
    let emp = EmpiricalDistribution::new(values).ok()?;
    Some((DistSummary::of(&emp), emp))
}

/// Summaries of the `t`, `fN` and `q_ratio` columns, the KS distance of `t`
/// to the limit density and the `(k1, k2)` frequencies (the ten most common).
pub fn summarize_rows(rows: &[SampleRow]) -> Result<SampleSummary> {
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    let t = summary_of(rows.iter().filter_map(|r| r.t).collect());
    let f_n = summary_of(rows.iter().filter_map(|r| r.f_n).collect());
    let q_ratio = summary_of(rows.iter().filter_map(|r| r.q_ratio).collect());
    let ks_t_vs_density = t.as_ref().map(|(_, emp)| {
        let table = DensityCdf::new();
        ks_distance(emp, |x| table.eval(x))
    });

    let mut table = GcdPairTable::default();
    for r in rows {
        *table.counts.entry((r.k1, r.k2)).or_default() += 1;
        table.total += 1;
    }
    let mut gcd_pairs: Vec<GcdPairFrequency> = table
        .counts
        .iter()
        .map(|(&(k1, k2), &count)| GcdPairFrequency {
            k1,
            k2,
            count,
            frequency: count as f64 / table.total as f64,
        })
        .collect();
    gcd_pairs.sort_by(|a, b| b.count.cmp(&a.count).then((a.k1, a.k2).cmp(&(b.k1, b.k2))));
    gcd_pairs.truncate(10);

    Ok(SampleSummary {
        schema: 1,
        rows: rows.len(),
        t: t.map(|(s, _)| s),
        f_n: f_n.map(|(s, _)| s),
        q_ratio: q_ratio.map(|(s, _)| s),
        t_mean_limit: MEAN_T,
        ks_t_vs_density,
        gcd_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{make_cf_record, make_record};
    use crate::IntTuple;

    #[test]
    fn csv_round_trip() {
        let records = vec![
            make_record(&IntTuple::new(vec![3, 5, 7]).unwrap(), 10, 1).unwrap(),
            make_record(&IntTuple::new(vec![6, 10, 15]).unwrap(), 15, 1).unwrap(),
            make_cf_record(&IntTuple::new(vec![2, 3, 5]).unwrap(), 10, 0).unwrap(),
        ];
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# frobenius-limit v1"));
        assert_eq!(lines.next(), Some("a1,a2,a3,F,fN,t,k1,k2,s1,q_ratio,h_window"));
        assert!(lines.next().unwrap().ends_with(",1 3"));
        let rows = read_rows_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], SampleRow::from(&records[0]));
        assert_eq!(rows[1].s1, None);
        assert_eq!(rows[2].frobenius, None);

        let summary = summarize_rows(&rows).unwrap();
        assert_eq!(summary.t.as_ref().unwrap().count, 2);
        assert_eq!(summary.gcd_pairs[0].count, 2);
        let json = serde_json::to_string(&summary).unwrap();
        assert!(json.starts_with("{\"schema\":1,"));
    }
}
