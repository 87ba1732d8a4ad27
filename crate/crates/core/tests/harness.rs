use geomedian::harness::{read_report_csv, COLUMNS};
use geomedian::{emit_report, run_scenario, with_workers, MetricsTable, ReportFormat, ScenarioSpec};

fn spec(json: &str) -> ScenarioSpec {
    ScenarioSpec::from_json(json).unwrap()
}

fn coverage_spec() -> ScenarioSpec {
    spec(r#"{"experiment":"coverage","model":{"kind":"student_t","df":4},"rho":0.5,
             "n":30,"p":12,"replications":12,"boot":60,"levels":[0.8,0.9],"seed":5}"#)
}

#[test]
fn reruns_and_worker_counts_give_identical_reports() {
    let scenarios = [
        coverage_spec(),
        spec(r#"{"experiment":"size_power","model":{"kind":"gaussian"},"n":25,"p":15,
                 "replications":10,"boot":50,"levels":[0.05,0.1],"seed":9,"kappa_grid":[0,2],
                 "methods":["median","mean","WPL","CQ"]}"#),
        spec(r#"{"experiment":"fdr","model":{"kind":"laplace"},"n":30,"p":40,
                 "theta_pattern":{"kind":"sparse3"},"replications":10,"levels":[0.1],"seed":2}"#),
        spec(r#"{"experiment":"are","model":{"kind":"gaussian"},"n":30,"p":5,"p_grid":[4,8],
                 "replications":10,"boot":40,"bootstrap_are":true,"seed":3}"#),
        spec(r#"{"experiment":"bahadur","model":{"kind":"gaussian"},"n":20,"p":6,
                 "n_grid":[20,80],"replications":10,"seed":4}"#),
    ];
    for s in &scenarios {
        let one = with_workers(1, || run_scenario(s)).unwrap().unwrap();
        let four = with_workers(4, || run_scenario(s)).unwrap().unwrap();
        assert!(!one.is_empty());
        let csv = emit_report(&one, ReportFormat::Csv).unwrap();
        assert_eq!(csv, emit_report(&four, ReportFormat::Csv).unwrap(), "{:?}", s.experiment);
        assert_eq!(csv, emit_report(&run_scenario(s).unwrap(), ReportFormat::Csv).unwrap());
    }
}

#[test]
fn csv_header_and_round_trips() {
    let table = run_scenario(&coverage_spec()).unwrap();
    let csv = emit_report(&table, ReportFormat::Csv).unwrap();
    assert_eq!(csv.lines().next().unwrap(), COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 1 + 4);
    assert_eq!(read_report_csv(&csv).unwrap(), table);
    let json = emit_report(&table, ReportFormat::Json).unwrap();
    let back: MetricsTable = serde_json::from_str(&json).unwrap();
    assert_eq!(back, table);
    let md = emit_report(&table, ReportFormat::Markdown).unwrap();
    assert!(md.starts_with("| scenario | experiment | level | method |"));
}

#[test]
fn different_seeds_give_different_reports() {
    let a = coverage_spec();
    let mut b = a.clone();
    b.seed += 1;
    assert_ne!(run_scenario(&a).unwrap(), run_scenario(&b).unwrap());
}

#[test]
fn global_null_fdr_is_the_rejection_frequency() {
    // with no signals the false discovery proportion is 0 or 1 per replication
    let s = spec(r#"{"experiment":"fdr","model":{"kind":"gaussian"},"n":60,"p":80,
                     "replications":50,"levels":[0.1,0.2],"seed":6}"#);
    let table = run_scenario(&s).unwrap();
    assert_eq!(table.len(), 4);
    for row in &table.rows {
        let fdr = row.fdr.unwrap();
        let hits = fdr * 50.0;
        assert!((hits - hits.round()).abs() < 1e-9, "{}: {fdr}", row.method);
        assert_eq!(row.fdr_power, None);
    }
    let at = |m: &str, a: f64| table.find(m, Some(a), None).unwrap().fdr.unwrap();
    assert!(at("median", 0.2) >= at("median", 0.1));
    assert!(at("mean", 0.2) >= at("mean", 0.1));
}

#[test]
fn strong_sparse_signals_are_all_found() {
    let s = spec(r#"{"experiment":"fdr","model":{"kind":"gaussian"},"n":100,"p":50,
                     "theta_pattern":{"kind":"ten_percent","scale":5},"replications":20,
                     "levels":[0.1],"seed":8}"#);
    let table = run_scenario(&s).unwrap();
    for method in ["median", "mean"] {
        let row = table.find(method, Some(0.1), None).unwrap();
        assert_eq!(row.fdr_power, Some(1.0), "{method}");
        assert!(row.fdr.unwrap() < 0.3);
    }
}

#[test]
fn invalid_scenarios_are_rejected() {
    let bad = [
        r#"{"experiment":"coverage","model":{"kind":"gaussian"},"n":1,"p":3,"seed":1}"#,
        r#"{"experiment":"coverage","model":{"kind":"gaussian"},"n":10,"p":3,"seed":1,"levels":[1.0]}"#,
        r#"{"experiment":"coverage","model":{"kind":"student_t","df":2},"n":10,"p":3,"seed":1}"#,
        r#"{"experiment":"coverage","model":{"kind":"gaussian"},"n":10,"p":3,"seed":1,"rho":1.0}"#,
        r#"{"experiment":"coverage","model":{"kind":"gaussian"},"n":10,"p":3,"seed":1,"typo":1}"#,
        r#"{"experiment":"are","model":{"kind":"gaussian"},"n":10,"p":3,"seed":1,"p_grid":[0]}"#,
    ];
    for text in bad {
        assert!(ScenarioSpec::from_json(text).is_err(), "{text}");
    }
}
