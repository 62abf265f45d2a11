//! Rendering of score tables.

use crate::metrics::ScoreReport;

pub const COLUMNS: [&str; 6] = [
    "ICM-Soft",
    "ICM-Soft Norm",
    "Cross Entropy",
    "ICM-Hard",
    "ICM-Hard Norm",
    "F1",
];

fn cell(value: Option<f64>, precision: usize) -> String {
    match value {
        // avoid printing "-0.00"
        Some(v)
            if format!("{v:.precision$}")
                .trim_start_matches('-')
                .bytes()
                .all(|b| b == b'0' || b == b'.') =>
        {
            format!("{:.precision$}", 0.0)
        }
        Some(v) => format!("{v:.precision$}"),
        None => "-".to_owned(),
    }
}

/// Tab-separated rows: `run` followed by the six metric columns.
pub fn render_tsv(reports: &[ScoreReport], precision: usize) -> String {
    let mut out = format!("run\t{}\n", COLUMNS.join("\t"));
    for r in reports {
        let cells: Vec<String> = r.columns().iter().map(|v| cell(*v, precision)).collect();
        out.push_str(&format!("{}\t{}\n", r.run, cells.join("\t")));
    }
    out
}

/// Space-aligned table with the same columns as [`render_tsv`].
pub fn render_table(reports: &[ScoreReport], precision: usize) -> String {
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("Run".to_owned())
        .chain(COLUMNS.iter().map(|c| (*c).to_owned()))
        .collect()];
    for r in reports {
        rows.push(
            std::iter::once(r.run.clone())
                .chain(r.columns().iter().map(|v| cell(*v, precision)))
                .collect(),
        );
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|i| rows.iter().map(|row| row[i].chars().count()).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, text)| {
                if i == 0 {
                    format!("{text:<w$}", w = widths[i])
                } else {
                    format!("{text:>w$}", w = widths[i])
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(name: &str, soft: bool) -> ScoreReport {
        ScoreReport {
            run: name.into(),
            scope: None,
            icm_soft: soft.then_some(3.1234),
            icm_soft_norm: soft.then_some(1.0),
            cross_entropy: soft.then_some(0.55),
            icm_hard: Some(-0.0001),
            icm_hard_norm: Some(0.27777),
            f1: Some(0.0),
            n_hard: 4,
            n_soft: 4,
        }
    }

    #[test]
    fn tsv_layout() {
        let text = render_tsv(&[report("gold", true), report("llm", false)], 2);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(
            lines[0],
            "run\tICM-Soft\tICM-Soft Norm\tCross Entropy\tICM-Hard\tICM-Hard Norm\tF1"
        );
        assert_eq!(lines[1], "gold\t3.12\t1.00\t0.55\t0.00\t0.28\t0.00");
        assert_eq!(lines[2], "llm\t-\t-\t-\t0.00\t0.28\t0.00");
    }

    #[test]
    fn table_is_aligned() {
        let text = render_table(&[report("gold", true), report("a-much-longer-name", false)], 2);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("Run "));
        assert!(lines[1].ends_with("0.00           0.28  0.00"), "{text}");
        assert!(lines[2].contains("   -"));
        assert_eq!(lines[0].len(), lines[1].len());
        assert_eq!(lines[1].len(), lines[2].len());
    }
}
