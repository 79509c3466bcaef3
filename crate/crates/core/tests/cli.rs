use std::io::Write;
use std::process::{Command, Output, Stdio};

fn recunfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recunfold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_sum() {
    let o = recunfold(&["run", "sum", "10", "--mode", "unfold"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "R = 55\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("apps=3"));
}

#[test]
fn run_gcd_with_exponent_input() {
    let o = recunfold(&["run", "gcd", "2^13", "37", "-q"]);
    assert_eq!(stdout(&o), "R = 1\n");
    let o = recunfold(&["run", "gcd", "2^13", "2^7", "-q"]);
    assert_eq!(stdout(&o), "R = 128\n");
}

#[test]
fn naive_caps() {
    let o = recunfold(&["run", "sum", "2^16", "--mode", "naive", "-q"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("R = {}\n", (1u64 << 16) * ((1 << 16) + 1) / 2));
    let o = recunfold(&["run", "fib", "40", "--mode", "naive"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--cap-override"));
}

#[test]
fn exit_codes() {
    assert_eq!(recunfold(&["run", "sum", "0"]).status.code(), Some(1));
    assert_eq!(recunfold(&["run", "gcd", "1", "0"]).status.code(), Some(2));
    assert_eq!(recunfold(&["run", "nope", "1"]).status.code(), Some(3));
    assert_eq!(recunfold(&["run", "sum", "s(("]).status.code(), Some(3));
}

#[test]
fn negative_inputs_are_not_flags() {
    let o = recunfold(&["run", "sum", "-3", "-q"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn oracle() {
    assert_eq!(stdout(&recunfold(&["oracle", "fib", "2^7"])), "R = 251728825683549488150424261\n");
    assert_eq!(stdout(&recunfold(&["oracle", "rev", "[1,2,3]"])), "R = [3,2,1]\n");
}

#[test]
fn unfold_dump() {
    let o = recunfold(&["unfold", "sum", "2"]);
    assert_eq!(
        stdout(&o),
        "s(A,B) :- A>1 ,!, C is A-1, s(C,D), B is 1*A-0+D.\ns(A,B) :- A=1 ,!, B=1, true, true.\n"
    );
    let o = recunfold(&["unfold", "fib", "20"]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.ends_with("B is 1597*E+987*F."), "{first}");
    let o = recunfold(&["unfold", "gcd", "100", "3"]);
    assert_eq!(stdout(&o).matches(":- deck.").count(), 2);
}

#[test]
fn program_file_and_query() {
    let dir = std::env::temp_dir().join(format!("recunfold-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("count.mpl");
    std::fs::write(&path, "c(N,K) :- N>0 ,!, M is N-1, c(M,J), K is J+1.\nc(0,0).\n").unwrap();
    let p = path.to_str().unwrap();
    let o = recunfold(&["run", "--program-file", p, "--mode", "naive", "5", "-q"]);
    assert_eq!(stdout(&o), "R = 5\n");
    let o = recunfold(&["run", "--program-file", p, "--mode", "naive", "--query", "c(3,Count)", "-q"]);
    assert_eq!(stdout(&o), "Count = 3\n");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bench_and_fit() {
    let o = recunfold(&["bench", "sum", "--sizes", "25,50,100,200", "--mode", "unfold", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "program,mode,input,unfold_ms,interp_ms,total_ms,apps,rounds,deck_size");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("sum,unfold,2^25,"));
    assert!(lines[4].ends_with(",201"), "{}", lines[4]);

    let mut fit = Command::new(env!("CARGO_BIN_EXE_recunfold"))
        .arg("fit")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    fit.stdin.take().unwrap().write_all(csv.as_bytes()).unwrap();
    let out = fit.wait_with_output().unwrap();
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.starts_with("sum unfold: "), "{report}");
    assert!(report.contains("residual="));
}

#[test]
fn bench_counters_are_stable() {
    let args = ["bench", "gcd", "--sizes", "10,20", "--reps", "1"];
    let strip = |o: Output| {
        stdout(&o)
            .lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", f[0], f[1], f[2], f[6..].join(","))
            })
            .collect::<Vec<_>>()
    };
    let a = strip(recunfold(&args));
    assert_eq!(a, strip(recunfold(&args)));
    assert_eq!(a.len(), 5);
    assert_eq!(a[1].split(',').take(3).collect::<Vec<_>>(), ["gcd", "naive", "2^10;37"]);
}
