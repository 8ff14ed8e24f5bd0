//! Line-oriented circuit text format.
//!
//! ```text
//! # comment, anywhere, to end of line
//! qubits 2
//! ry 0 1.5707963
//! xx 0 1 1.5707963
//! measure
//! ```
//!
//! The header `qubits N` comes first. Gate lines follow: `rx q th`, `ry q
//! th`, `rz q th`, `xx q1 q2 th`. An optional final `measure` marks a
//! full-register measurement; no gates may follow it. The extended format
//! accepted by [`parse_ext_circuit`] additionally allows `h q`,
//! `cnot q1 q2` and `cphase q1 q2 th`.
//!
//! Serialization is canonical: one gate per line, angles reduced to
//! `(-2pi, 2pi]` and printed with 12 significant digits, so
//! `serialize(parse(t))` is a fixed point of `parse`/`serialize`.

use super::{Circuit, ExtCircuit, ExtGate, Gate};
use crate::error::{Error, Result};

/// Parses the native-gate text format.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let ext = parse_ext_circuit(text)?;
    let mut gates = Vec::with_capacity(ext.gates().len());
    for (gate, line) in ext.gates.iter().zip(&ext_gate_lines(text)) {
        match gate {
            ExtGate::Native(g) => gates.push(*g),
            other => {
                return Err(Error::Parse {
                    line: *line,
                    message: format!(
                        "extended gate `{}` is not allowed here; transpile to the native set first",
                        ext_mnemonic(other)
                    ),
                })
            }
        }
    }
    Circuit::new(ext.n_qubits, gates, ext.measured)
}

/// Parses the extended text format (native gates plus `h`, `cnot`,
/// `cphase`).
pub fn parse_ext_circuit(text: &str) -> Result<ExtCircuit> {
    let mut n_qubits: Option<usize> = None;
    let mut gates: Vec<ExtGate> = Vec::new();
    let mut measured = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = line.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();

        let err = |message: String| Error::Parse { line: line_no, message };

        if head == "qubits" {
            if n_qubits.is_some() {
                return Err(err("duplicate `qubits` header".into()));
            }
            if !gates.is_empty() || measured {
                return Err(err("`qubits` header must come first".into()));
            }
            let n = parse_usize(&rest, 0, line_no, "qubit count")?;
            if rest.len() != 1 {
                return Err(err("expected `qubits N`".into()));
            }
            if n == 0 {
                return Err(err("qubit count must be at least 1".into()));
            }
            n_qubits = Some(n);
            continue;
        }

        let n = n_qubits.ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected `qubits N` header before gates".into(),
        })?;
        if measured {
            return Err(err(format!("`{head}` after `measure`")));
        }

        let gate = match head {
            "measure" => {
                if !rest.is_empty() {
                    return Err(err("`measure` takes no arguments".into()));
                }
                measured = true;
                continue;
            }
            "rx" | "ry" | "rz" => {
                expect_args(&rest, 2, line_no, head)?;
                let q = parse_usize(&rest, 0, line_no, "qubit")?;
                let angle = parse_angle(&rest, 1, line_no)?;
                ExtGate::Native(match head {
                    "rx" => Gate::rx(q, angle),
                    "ry" => Gate::ry(q, angle),
                    _ => Gate::rz(q, angle),
                })
            }
            "xx" => {
                expect_args(&rest, 3, line_no, head)?;
                let a = parse_usize(&rest, 0, line_no, "qubit")?;
                let b = parse_usize(&rest, 1, line_no, "qubit")?;
                let angle = parse_angle(&rest, 2, line_no)?;
                ExtGate::Native(Gate::xx(a, b, angle))
            }
            "h" => {
                expect_args(&rest, 1, line_no, head)?;
                ExtGate::H { qubit: parse_usize(&rest, 0, line_no, "qubit")? }
            }
            "cnot" => {
                expect_args(&rest, 2, line_no, head)?;
                ExtGate::Cnot {
                    control: parse_usize(&rest, 0, line_no, "qubit")?,
                    target: parse_usize(&rest, 1, line_no, "qubit")?,
                }
            }
            "cphase" => {
                expect_args(&rest, 3, line_no, head)?;
                ExtGate::Cphase {
                    a: parse_usize(&rest, 0, line_no, "qubit")?,
                    b: parse_usize(&rest, 1, line_no, "qubit")?,
                    angle: parse_angle(&rest, 2, line_no)?,
                }
            }
            other => return Err(err(format!("unknown gate mnemonic `{other}`"))),
        };
        gate.validate(n).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        gates.push(gate);
    }

    let n_qubits = n_qubits.ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        message: "missing `qubits N` header".into(),
    })?;
    ExtCircuit::new(n_qubits, gates, measured)
}

/// Serializes a circuit to the canonical text form.
pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = format!("qubits {}\n", c.n_qubits());
    for gate in c.gates() {
        match *gate {
            Gate::Rx { qubit, angle } => {
                out.push_str(&format!("rx {qubit} {}\n", fmt_significant(angle, 12)))
            }
            Gate::Ry { qubit, angle } => {
                out.push_str(&format!("ry {qubit} {}\n", fmt_significant(angle, 12)))
            }
            Gate::Rz { qubit, angle } => {
                out.push_str(&format!("rz {qubit} {}\n", fmt_significant(angle, 12)))
            }
            Gate::Xx { a, b, angle } => {
                out.push_str(&format!("xx {a} {b} {}\n", fmt_significant(angle, 12)))
            }
        }
    }
    if c.measured() {
        out.push_str("measure\n");
    }
    out
}

/// Line numbers of the gate lines, in order, so [`parse_circuit`] can report
/// the offending line when it rejects an extended gate.
fn ext_gate_lines(text: &str) -> Vec<usize> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = line.split_whitespace();
        let Some(head) = tokens.next() else { continue };
        if head != "qubits" && head != "measure" {
            lines.push(idx + 1);
        }
    }
    lines
}

fn ext_mnemonic(g: &ExtGate) -> &'static str {
    match g {
        ExtGate::Native(_) => "native",
        ExtGate::H { .. } => "h",
        ExtGate::Cnot { .. } => "cnot",
        ExtGate::Cphase { .. } => "cphase",
    }
}

fn expect_args(rest: &[&str], n: usize, line: usize, head: &str) -> Result<()> {
    if rest.len() != n {
        return Err(Error::Parse {
            line,
            message: format!("`{head}` expects {n} argument(s), got {}", rest.len()),
        });
    }
    Ok(())
}

fn parse_usize(rest: &[&str], idx: usize, line: usize, what: &str) -> Result<usize> {
    let tok = rest.get(idx).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a nonnegative integer {what}, got `{tok}`"),
    })
}

fn parse_angle(rest: &[&str], idx: usize, line: usize) -> Result<f64> {
    let tok = rest.get(idx).ok_or_else(|| Error::Parse {
        line,
        message: "missing angle".into(),
    })?;
    let angle: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected an angle, got `{tok}`"),
    })?;
    if !angle.is_finite() {
        return Err(Error::Parse { line, message: format!("angle must be finite, got `{tok}`") });
    }
    Ok(angle)
}

/// Formats `x` with `sig` significant digits, positional where reasonable
/// and scientific otherwise. The decimal shift is done on the digit string,
/// so the value is rounded exactly once.
pub(crate) fn fmt_significant(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();

    let body = if exp >= 0 && (exp as usize) < sig {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            digits
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else if (-4..0).contains(&exp) {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let mantissa = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        let s = format!("{mantissa}e{exp}");
        return if neg { format!("-{s}") } else { s };
    };
    let body = trim_fraction(&body);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_the_usual_form() {
        let text = "# bell pair\nqubits 2\nry 0 1.5707963\nxx 0 1 1.5707963  # entangler\nmeasure\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.gates().len(), 2);
        assert!(c.measured());
        assert_eq!(c.gates()[0], Gate::ry(0, 1.5707963));
    }

    #[test]
    fn empty_circuit_serializes_to_header_only() {
        let c = Circuit::new(1, vec![], false).unwrap();
        assert_eq!(serialize_circuit(&c), "qubits 1\n");
    }

    #[test]
    fn rejects_unknown_mnemonic() {
        let err = parse_circuit("qubits 1\nfoo 0 1.0\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("foo"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_xx_target_with_line() {
        let err = parse_circuit("qubits 2\nxx 1 1 0.5\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_gates_after_measure() {
        let err = parse_circuit("qubits 1\nmeasure\nrx 0 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn rejects_missing_header() {
        assert!(parse_circuit("rx 0 0.5\n").is_err());
        assert!(parse_circuit("").is_err());
    }

    #[test]
    fn native_parser_rejects_extended_gates() {
        let err = parse_circuit("qubits 2\nh 0\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains('h'), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_ext_circuit("qubits 2\nh 0\n").is_ok());
    }

    #[test]
    fn round_trip_is_structural_identity_on_parsed_circuits() {
        let text = "qubits 3\nrx 0 0.25\nxx 0 2 -1.25\nrz 1 6.28\nmeasure\n";
        let c = parse_circuit(text).unwrap();
        let again = parse_circuit(&serialize_circuit(&c)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn serialize_parse_serialize_is_idempotent() {
        // Angles outside the canonical range and with more digits than the
        // serializer keeps; the first pass canonicalizes, after which the
        // form is stable.
        let c = Circuit::new(
            2,
            vec![
                Gate::rx(0, 37.123456789012345),
                Gate::xx(0, 1, PI / 2.0),
                Gate::rz(1, -9.999999999999),
            ],
            true,
        )
        .unwrap();
        let s1 = serialize_circuit(&c);
        let s2 = serialize_circuit(&parse_circuit(&s1).unwrap());
        assert_eq!(s1, s2);
    }

    #[test]
    fn fmt_significant_cases() {
        assert_eq!(fmt_significant(0.0, 12), "0");
        assert_eq!(fmt_significant(1.5, 12), "1.5");
        assert_eq!(fmt_significant(-0.5, 12), "-0.5");
        assert_eq!(fmt_significant(PI / 2.0, 12), "1.57079632679");
        assert_eq!(fmt_significant(2.0 * PI, 12), "6.28318530718");
        assert_eq!(fmt_significant(1e-7, 12), "1e-7");
        assert_eq!(fmt_significant(123.0, 3), "123");
        assert_eq!(fmt_significant(1234.0, 3), "1.23e3");
        assert_eq!(fmt_significant(0.001234, 3), "0.00123");
    }
}
