use abelcov::paper::{paper_examples, paper_rows};
use abelcov::scan::{
    emit, emit_outcome, run_scan, GroupSpec, OutputFormat, ScanJob, ScanRow,
};
use abelcov::{AutBounds, Verdict};

fn scan(groups: &str, lo: usize, hi: usize, jobs: usize) -> Vec<ScanRow> {
    let mut job = ScanJob::new(groups.parse().unwrap(), lo..=hi);
    job.jobs = jobs;
    run_scan(&job, &AutBounds::default()).unwrap().rows
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let one = scan("all:12", 4, 7, 1);
    let four = scan("all:12", 4, 7, 4);
    assert!(!one.is_empty());
    assert_eq!(one, four);
    for f in [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Md] {
        assert_eq!(emit(&one, f), emit(&four, f));
    }
}

#[test]
fn rows_are_sorted_and_unique() {
    let rows = scan("all:16", 4, 6, 3);
    let key = |r: &ScanRow| {
        let order: u32 = r.group.iter().product();
        (order, r.group.clone(), r.s, r.theta.clone())
    };
    for w in rows.windows(2) {
        assert!(key(&w[0]) < key(&w[1]), "{:?} !< {:?}", w[0], w[1]);
    }
}

#[test]
fn hyperelliptic_rows_are_special_only_at_six_points() {
    let rows = scan("2", 4, 10, 2);
    // Z/2 needs an even number of branch points; genus ≥ 2 needs s ≥ 6.
    let counts: Vec<usize> = (4..=10).map(|s| rows.iter().filter(|r| r.s == s).count()).collect();
    assert_eq!(counts, vec![0, 0, 1, 0, 1, 0, 1]);
    for r in &rows {
        // one eigenspace of dimension g = (s − 2)/2 carrying Sp(2g)
        let g = (r.s as u64 - 2) / 2;
        assert_eq!(r.genus, g);
        assert_eq!(r.dim_z, r.s as u64 - 3);
        assert_eq!(r.dim_sg, g * (g + 1) / 2);
        let special = r.s as u64 - 3 == g * (g + 1) / 2;
        assert_eq!(r.verdict == Verdict::Special, special, "{r:?}");
        assert_eq!(special, r.s == 6);
    }
}

#[test]
fn parity_obstruction_gives_no_rows() {
    assert!(scan("2", 5, 5, 1).is_empty());
}

#[test]
fn small_groups_pass_row_oracles() {
    // run_scan re-checks Σm_χ = g and the δ ledger on every row and errors out otherwise
    let rows = scan("all:4", 4, 6, 2);
    assert!(rows.len() > 5);
}

#[test]
fn genus_cap_filters_rows() {
    let all = scan("all:8", 4, 7, 2);
    let mut job = ScanJob::new(GroupSpec::AllUpTo(8), 4..=7);
    job.genus_max = Some(4);
    let capped = run_scan(&job, &AutBounds::default()).unwrap().rows;
    let expected: Vec<ScanRow> = all.into_iter().filter(|r| r.genus <= 4).collect();
    assert_eq!(capped, expected);
}

#[test]
fn emit_is_bit_stable() {
    let rows = scan("6,2x2", 4, 6, 2);
    let job = ScanJob::new("6,2x2".parse().unwrap(), 4..=6);
    let outcome = run_scan(&job, &AutBounds::default()).unwrap();
    for f in [OutputFormat::Csv, OutputFormat::Json, OutputFormat::Md] {
        assert_eq!(emit(&rows, f), emit(&rows, f));
        assert_eq!(emit_outcome(&outcome, f), emit_outcome(&outcome, f));
    }
    let csv = String::from_utf8(emit_outcome(&outcome, OutputFormat::Csv)).unwrap();
    let footer = csv.lines().last().unwrap();
    assert!(footer.starts_with(&format!("# rows={}", rows.len())), "{footer}");
}

#[test]
fn markdown_lists_worked_examples_in_order() {
    let md = String::from_utf8(emit(&paper_rows(), OutputFormat::Md)).unwrap();
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines.len(), 2 + 4);
    let expected = ["NOT_SPECIAL", "NOT_SPECIAL", "NOT_SPECIAL", "INCONCLUSIVE"];
    for ((line, ex), verdict) in lines[2..].iter().zip(paper_examples()).zip(expected) {
        let group = ex.orders.iter().map(u32::to_string).collect::<Vec<_>>().join("x");
        assert!(line.starts_with(&format!("| {group} | {} |", ex.theta.len())), "{line}");
        assert!(line.ends_with(&format!("| {verdict} |")), "{line}");
    }
}

#[test]
fn json_rows_round_trip_field_names() {
    let rows = scan("2", 6, 6, 1);
    let v: serde_json::Value = serde_json::from_slice(&emit(&rows, OutputFormat::Json)).unwrap();
    let row = &v[0];
    assert_eq!(row["dim_Z"], 3);
    assert_eq!(row["dim_SG"], 3);
    assert_eq!(row["verdict"], "SPECIAL");
    assert_eq!(row["theta"], serde_json::json!([[1], [1], [1], [1], [1], [1]]));
}
