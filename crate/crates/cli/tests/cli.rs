use std::process::{Command, Output};

fn fibdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibdiff")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV report (header excluded).
fn rows(text: &str) -> Vec<Vec<String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn summary(text: &str, key: &str) -> String {
    let prefix = format!("# summary.{key}=");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no {key}")).to_string()
}

#[test]
fn generate_small_range() {
    let o = fibdiff(&["generate", "--range", "[-2,2]"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let r = rows(&text);
    assert_eq!(r.len(), 3);
    let coords: Vec<(&str, &str)> = r.iter().map(|row| (row[2].as_str(), row[3].as_str())).collect();
    assert_eq!(coords, [("-1", "0"), ("0", "0"), ("0", "1")]);
    assert!(text.contains("# window=[-1,"));
}

#[test]
fn generate_empty_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = fibdiff(&["generate", "--range", "[0.1,0.5]", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(rows(&text).is_empty());
    assert!(text.contains("position,star,m,n\n"));
    assert_eq!(summary(&text, "count"), "0");
}

#[test]
fn dual_gap_bound() {
    let o = fibdiff(&["generate", "--side", "dual", "--window", "[-0.1,0.1]", "--range", "[-100,100]"]);
    assert!(o.status.success());
    let gap: f64 = summary(&stdout(&o), "max_gap").parse().unwrap();
    assert!(gap <= 8.472, "{gap}");
}

#[test]
fn bragg_full_and_bernoulli_pass() {
    for subset in ["full", "bernoulli:p=0.5:seed=42"] {
        let o = fibdiff(&["bragg", "--subset", subset, "--n", "5e3", "--range", "[-10,10]"]);
        assert!(o.status.success(), "{subset}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert_eq!(summary(&text, "all_pass"), "true");
        assert!(!rows(&text).is_empty());
    }
}

#[test]
fn bragg_empty_is_vacuous() {
    let o = fibdiff(&["bragg", "--subset", "empty"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(summary(&text, "vacuous"), "true");
    assert!(summary(&text, "note").contains("vacuous"));
}

#[test]
fn byte_deterministic_across_threads() {
    let args = ["bragg", "--subset", "bernoulli:p=0.3:seed=11", "--n", "3e3", "--format", "json"];
    let one = fibdiff(&[&args[..], &["--threads", "1"]].concat());
    let four = fibdiff(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn failing_check_exits_one_with_record() {
    let o = fibdiff(&["bragg", "--n", "3e3", "--agreement-tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["failure"], "bragg");
    assert!(v["failed_records"].as_u64().unwrap() > 0);
}

#[test]
fn bad_input_exits_two() {
    let o = fibdiff(&["generate", "--range", "[2,1]"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fibdiff(&["pingcheck", "--phi-halfwidth", "1/pi"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_parses() {
    let o = fibdiff(&["almostperiods", "--alpha", "1e-4", "--count", "2", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["command"], "almostperiods");
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    for r in recs {
        for key in ["t", "t_star", "alpha", "truncated_norm", "tail_bound", "paper_bound", "pass", "Y", "K"] {
            assert!(!r[key].is_null(), "missing {key}");
        }
        assert_eq!(r["K"], serde_json::json!([-0.5, 1.5]));
        assert_eq!(r["pass"], true);
        assert!(
            r["truncated_norm"].as_f64().unwrap() + r["tail_bound"].as_f64().unwrap()
                < r["paper_bound"].as_f64().unwrap()
        );
    }
}

#[test]
fn lemmas_pass() {
    let o = fibdiff(&["lemmas", "--grid", "20000", "--trials", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&stdout(&o), "failures"), "0");
}

#[test]
fn bragg_report_schema() {
    let o = fibdiff(&["bragg", "--n", "2e3", "--range", "[-3,3]", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for r in v["records"].as_array().unwrap() {
        for key in ["k", "k_star", "intensity", "bound", "pass", "n", "method"] {
            assert!(!r[key].is_null(), "missing {key}");
        }
        assert_eq!(r["n"], 2e3);
    }
}
