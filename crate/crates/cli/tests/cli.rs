use congruent_cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["congruent"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = invoke(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn csv_headers() {
    let cases: &[(&[&str], &str)] = &[
        (&["certify", "--residue", "5", "--max-n", "40"], "n,residue,row,selmer_rank3,L_value"),
        (&["simulate", "--row", "5a", "--r", "4", "--samples", "50"], "corank,count,frequency"),
        (&["scan", "--residue", "5", "--max-n", "500"], "metric,count,total,frequency,ci_low,ci_high"),
        (&["census", "--max-n", "500"], "metric,count,total,frequency,ci_low,ci_high"),
        (&["verify", "--max-n", "200"], "n,row,L_value,det_value,matrix"),
        (&["markov", "--chain", "odd", "--k-max", "9"], "k,probability,closed_form"),
        (&["alpha", "--k-max", "3"], "k,alpha"),
    ];
    for (args, header) in cases {
        let (code, out, err) = invoke(args);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert_eq!(out.lines().next(), Some(*header), "{args:?}");
    }
}

#[test]
fn certify_lists_small_certificates() {
    let (code, out, _) = invoke(&["certify", "--residue", "5", "--max-n", "40"]);
    assert_eq!(code, 0);
    let ns: Vec<u64> = out.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    for n in [5, 13, 21, 29, 37] {
        assert!(ns.contains(&n), "{n} missing from {ns:?}");
    }
    assert!(out.lines().skip(1).all(|l| l.ends_with(",1,1")));
    let (_, out, _) = invoke(&["certify", "--residue", "7", "--max-n", "10"]);
    assert_eq!(out.lines().nth(1), Some("7,7,7a,1,1"));
    let (_, out, _) = invoke(&["certify", "--residue", "6", "--max-n", "10"]);
    assert_eq!(out.lines().nth(1), Some("6,6,6,1,1"));
}

#[test]
fn json_matches_csv() {
    let args = ["scan", "--residue", "7", "--max-n", "3000"];
    let (_, csv_out, _) = invoke(&args);
    let v = json(&args);
    let metrics = v["metrics"].as_array().unwrap();
    let mut rdr = csv::Reader::from_reader(csv_out.as_bytes());
    let records: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), metrics.len());
    for (rec, m) in records.iter().zip(metrics) {
        assert_eq!(&rec[0], m["metric"].as_str().unwrap());
        assert_eq!(rec[1].parse::<u64>().unwrap(), m["count"].as_u64().unwrap());
        assert_eq!(rec[2].parse::<u64>().unwrap(), m["total"].as_u64().unwrap());
        for (i, key) in [(3, "frequency"), (4, "ci_low"), (5, "ci_high")] {
            assert_eq!(rec[i].parse::<f64>().unwrap(), m[key].as_f64().unwrap(), "{key}");
        }
    }
}

#[test]
fn json_meta() {
    let v = json(&["simulate", "--row", "7ab", "--r", "5", "--samples", "300", "--seed", "17"]);
    let meta = &v["meta"];
    assert_eq!(meta["command"], "simulate");
    assert_eq!(meta["seed"], 17);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    let hash = meta["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 16);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(v["delta"], 0);
    assert_eq!(v["parity_violations"], 0);
    let total: u64 = v["histogram"].as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 300);

    let other = json(&["simulate", "--row", "7ab", "--r", "5", "--samples", "300", "--seed", "18"]);
    assert_ne!(other["meta"]["config_hash"], meta["config_hash"]);
    assert_eq!(json(&["alpha"])["meta"]["seed"], serde_json::Value::Null);
}

#[test]
fn alpha_and_markov_values() {
    let v = json(&["alpha", "--k-max", "2"]);
    let a1 = v["alpha"][1]["alpha"].as_f64().unwrap();
    assert!(a1 > 0.8388 && a1 < 0.8389);
    let v = json(&["markov", "--chain", "classrank", "--k-max", "16"]);
    for row in v["stationary"].as_array().unwrap().iter().take(9) {
        let (p, c) = (row["probability"].as_f64().unwrap(), row["closed_form"].as_f64().unwrap());
        assert!((p - c).abs() < 1e-6);
    }
}

#[test]
fn seeded_output_is_independent_of_workers() {
    let base = ["simulate", "--row", "6", "--r", "8", "--samples", "5000", "--seed", "3"];
    let with = |w: &str| {
        let mut a = base.to_vec();
        a.extend(["--workers", w, "--format", "json"]);
        invoke(&a)
    };
    let one = with("1");
    assert_eq!(one.0, 0);
    assert_eq!(one, with("2"));
    assert_eq!(one, with("1"));
    let scan = |w: &str| invoke(&["scan", "--residue", "5", "--max-n", "200000", "--workers", w]);
    assert_eq!(scan("1"), scan("3"));
}

#[test]
fn classcheck_text_output() {
    let (code, out, _) = invoke(&["classcheck", "--max-n", "300"]);
    assert_eq!(code, 0);
    assert_eq!(out, format!("checked: {}\nagree: all\n", out.lines().next().unwrap()[9..].trim()));
    let v = json(&["classcheck", "--max-n", "300"]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["checked"].as_u64().unwrap(), out.lines().next().unwrap()[9..].trim().parse::<u64>().unwrap());
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.csv");
    let (code, out, _) = invoke(&["alpha", "--k-max", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn exit_codes() {
    assert_eq!(invoke(&["--help"]).0, 0);
    let (code, out, err) = invoke(&["--version"]);
    assert_eq!(code, 0);
    assert!(out.contains(env!("CARGO_PKG_VERSION")));
    assert!(err.is_empty());
    assert_eq!(invoke(&["frobnicate"]).0, 3);
    assert_eq!(invoke(&["scan", "--residue", "4"]).0, 3);
    assert_eq!(invoke(&["certify", "--residue", "3", "--max-n", "10"]).0, 3);
    assert_eq!(invoke(&["simulate", "--row", "9z", "--samples", "10"]).0, 3);
    assert_eq!(invoke(&["simulate", "--row", "5a", "--r", "65"]).0, 3);
    assert_eq!(invoke(&["verify", "--max-n", "0"]).0, 3);
    assert_eq!(invoke(&["markov", "--k-max", "4"]).0, 3);
    assert_eq!(invoke(&["markov", "--tol", "0"]).0, 1);
    let (code, _, err) = invoke(&["alpha", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
}

#[test]
fn sieve_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sieve.bin");
    std::env::set_var(congruent_cli::SIEVE_CACHE_ENV, &path);
    let first = invoke(&["certify", "--residue", "5", "--max-n", "1000"]);
    assert!(path.exists());
    let second = invoke(&["certify", "--residue", "5", "--max-n", "1000"]);
    std::env::remove_var(congruent_cli::SIEVE_CACHE_ENV);
    assert_eq!(first, second);
    assert_eq!(first.0, 0);
}
