use skewdose::cli::run;
use skewdose::document::from_document;

const TABLE: &str = "dose,mean,sd,skew,n\n0,33.3875,26.9715,-0.0276,8\n0.75,44.1625,30.8113,-0.1381,8\n1.5,51.5,44.6582,1.2827,8\n3,78.225,31.9657,0.3504,8\n";

fn cli(args: &[&str], stdin: &[u8]) -> (i32, String, String) {
    let mut input = stdin;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv: Vec<&str> = std::iter::once("skewdose").chain(args.iter().copied()).collect();
    let code = run(argv, &mut input, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn fitted_doc() -> String {
    let (code, out, err) = cli(&["fit"], TABLE.as_bytes());
    assert_eq!(code, 0, "{err}");
    out
}

#[test]
fn fit_reproduces_escape_time_model() {
    let doc = fitted_doc();
    let m = from_document(&doc).unwrap();
    assert!((m.mu_curve.l1 - 21.8153).abs() < 1e-3);
    assert!((m.sigma_curve.eval(3.0) - 32.4903).abs() < 5e-3);
    assert!(doc.contains("sigma.family=gaussian\n"));
    assert!(doc.contains("fit.l1_equation_residual="));
}

#[test]
fn optimal_picks_largest_dose_for_mean_weight() {
    let (code, out, err) =
        cli(&["optimal", "--interval", "0", "3", "--weights", "1", "0", "0"], fitted_doc().as_bytes());
    assert_eq!(code, 0, "{err}");
    assert!(out.lines().any(|l| l == "dose=3.0"), "{out}");
    assert!(out.starts_with("mode=scalarized\n"));
}

#[test]
fn simulate_is_deterministic_and_parses_back() {
    let doc = fitted_doc();
    let args = ["simulate", "--dose", "3", "--n", "2000", "--seed", "11"];
    let (c1, a, _) = cli(&args, doc.as_bytes());
    let (c2, b, _) = cli(&args, doc.as_bytes());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let (code, summary, err) = cli(&["summarize"], a.as_bytes());
    assert_eq!(code, 0, "{err}");
    assert!(summary.starts_with("dose,n,mean,sd,skew\n3.0,2000,"), "{summary}");
}

#[test]
fn fit_accepts_raw_observations() {
    let doc = fitted_doc();
    let mut raw = String::from("dose,value\n");
    for (i, d) in ["0", "0.75", "1.5", "3"].iter().enumerate() {
        let (code, out, _) = cli(&["simulate", "--dose", d, "--n", "400", "--seed", &i.to_string()], doc.as_bytes());
        assert_eq!(code, 0);
        raw.extend(out.lines().skip(1).map(|l| format!("{l}\n")));
    }
    let (code, out, err) = cli(&["fit", "--offset", "grid"], raw.as_bytes());
    assert!(code == 0 || err.starts_with("ERROR "), "{err}");
    if code == 0 {
        assert!(from_document(&out).is_ok());
    }
}

#[test]
fn check_and_plot() {
    let doc = fitted_doc();
    let (code, out, _) = cli(&["check"], doc.as_bytes());
    assert_eq!(code, 0);
    assert!(out.contains("passed=true\n"), "{out}");
    let (code, out, _) = cli(&["plot", "--curve", "sd", "--steps", "5"], doc.as_bytes());
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    assert!(out.starts_with("x,y\n"));
    let (code, svg, _) = cli(&["plot", "--format", "svg"], doc.as_bytes());
    assert_eq!(code, 0);
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn errors_have_codes_and_exit_statuses() {
    let (code, _, err) = cli(&["fit", "--offset", "zero"], TABLE.as_bytes());
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR "), "{err}");
    let (code, _, err) = cli(&["summarize"], b"dose,value\n1,abc\n");
    assert_eq!(code, 1);
    assert!(err.starts_with("ERROR ParseError"), "{err}");
    let (code, _, _) = cli(&["simulate"], b"");
    assert_eq!(code, 2);
    let (code, _, err) = cli(&["optimal", "--interval", "0", "3"], fitted_doc().as_bytes());
    assert_eq!(code, 1, "{err}");
}
