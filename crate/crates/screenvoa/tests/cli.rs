use std::process::Command;

fn screenvoa(args: &[&str]) -> (Option<i32>, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_screenvoa")).args(args).output().unwrap();
    (o.status.code(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

#[test]
fn kernel_report_kv() {
    let (code, out, _) = screenvoa(&["kernel", "--divisor", "d1,d1", "--cutoff", "3", "--format", "kv"]);
    assert_eq!(code, Some(0));
    let keys: Vec<&str> = out.lines().map(|l| l.split('=').next().unwrap()).collect();
    assert_eq!(&keys[..7], ["tool", "version", "command", "config_hash", "convention.orientation", "convention.cocycle", "convention.sector_bound"]);
    assert!(out.contains("dim.2=3\n"));
    assert!(out.ends_with("status=pass\n"));
}

#[test]
fn localize_residue_is_zero() {
    let (code, out, _) = screenvoa(&["localize", "--cutoff", "3", "--format", "kv"]);
    assert_eq!(code, Some(0));
    assert!(out.contains("heisenberg.residue=0\n"));
    assert!(out.contains("b-1.(1).()=1/(e1*e2)\n"));
}

#[test]
fn config_file_and_override() {
    let path = std::env::temp_dir().join("screenvoa_cli_integration.toml");
    std::fs::write(&path, "geometry = \"C3\"\ndivisor = \"d1,d1\"\ncutoff = 1\nformat = \"csv\"\n").unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = screenvoa(&["kernel", "--config", p]);
    assert_eq!(code, Some(0));
    assert_eq!(out, "degree,dim\n0,1\n1,1\n");
    let (_, kv, _) = screenvoa(&["kernel", "--config", p, "--format", "kv"]);
    assert!(kv.contains("divisor=d1,d1"));
}

#[test]
fn bad_input_exits_two() {
    let (code, _, err) = screenvoa(&["algebra", "--geometry", "Y(9,9)", "--divisor", "d1"]);
    assert_eq!(code, Some(2));
    assert!(err.starts_with("error:"));
    let (code, _, _) = screenvoa(&["verify", "--suite", "nope"]);
    assert_eq!(code, Some(2));
}
