use super::{Angle, Circuit, Gate};
use crate::scalar::Real;

/// Circuit text that could not be parsed, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

pub(super) fn parse<T: Real>(text: &str) -> Result<Circuit<T>, ParseError> {
    let mut circuit: Option<Circuit<T>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let op = tokens[0].to_ascii_lowercase();
        if op == "qubits" {
            if circuit.is_some() {
                return Err(err(line_no, "duplicate `qubits` declaration"));
            }
            if tokens.len() != 2 {
                return Err(err(line_no, "expected `qubits <n>`"));
            }
            let n = parse_index(tokens[1], line_no)?;
            circuit = Some(Circuit::new(n).map_err(|e| err(line_no, e.to_string()))?);
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err(line_no, "gate before `qubits` declaration"))?;
        let gate = parse_gate::<T>(&op, &tokens[1..], line_no)?;
        c.push(gate).map_err(|e| err(line_no, e.to_string()))?;
    }
    circuit.ok_or_else(|| err(text.lines().count().max(1), "missing `qubits` declaration"))
}

fn parse_index(tok: &str, line: usize) -> Result<usize, ParseError> {
    tok.parse::<usize>().map_err(|_| err(line, format!("invalid qubit index `{tok}`")))
}

fn parse_angle<T: Real>(tok: &str, line: usize) -> Result<Angle<T>, ParseError> {
    let v: f64 = tok.parse().map_err(|_| err(line, format!("invalid angle `{tok}`")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite angle `{tok}`")));
    }
    Ok(Angle::new(T::lit(v)))
}

fn parse_gate<T: Real>(op: &str, args: &[&str], line: usize) -> Result<Gate<T>, ParseError> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(line, format!("`{op}` expects {n} argument(s), got {}", args.len())))
        }
    };
    let single = |ctor: fn(usize) -> Gate<T>| -> Result<Gate<T>, ParseError> {
        arity(1)?;
        Ok(ctor(parse_index(args[0], line)?))
    };
    let pair = |ctor: fn(usize, usize) -> Gate<T>| -> Result<Gate<T>, ParseError> {
        arity(2)?;
        Ok(ctor(parse_index(args[0], line)?, parse_index(args[1], line)?))
    };
    match op {
        "i" => single(Gate::I),
        "x" => single(Gate::X),
        "y" => single(Gate::Y),
        "z" => single(Gate::Z),
        "h" => single(Gate::H),
        "hp" => single(Gate::Hp),
        "xrot" | "zrot" => {
            arity(2)?;
            let q = parse_index(args[0], line)?;
            let a = parse_angle(args[1], line)?;
            Ok(if op == "xrot" { Gate::XRot(q, a) } else { Gate::ZRot(q, a) })
        }
        "cz" => pair(Gate::Cz),
        "cx" => pair(Gate::Cx),
        "swap" => pair(Gate::Swap),
        other => Err(err(line, format!("unknown gate `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_gate_kinds_and_comments() {
        let text = "# header\nqubits 3\nh 0\nhp 1 # trailing\nxrot 2 0.5\nzrot 0 -1\ncz 0 1\ncx 1 2\nswap 0 2\ni 0\nx 1\ny 2\nz 0\n";
        let c = Circuit::<f64>::parse(text).unwrap();
        assert_eq!(c.width(), 3);
        assert_eq!(c.gates().len(), 11);
        assert_eq!(c.gates()[2], Gate::XRot(2, Angle::new(0.5)));
    }

    #[test]
    fn rejects_out_of_range_qubit_with_line() {
        let e = Circuit::<f64>::parse("qubits 2\nh 0\ncz 0 2\n").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn rejects_unknown_gate_and_missing_header() {
        assert_eq!(Circuit::<f64>::parse("qubits 1\nfoo 0\n").unwrap_err().line, 2);
        assert!(Circuit::<f64>::parse("h 0\n").is_err());
        assert!(Circuit::<f64>::parse("").is_err());
        assert!(Circuit::<f64>::parse("qubits 2\ncz 1 1\n").is_err());
        assert!(Circuit::<f64>::parse("qubits 1\nxrot 0 nan\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = Circuit::<f64>::parse("qubits 2\nxrot 0 0.1\nzrot 1 3.5\ncx 0 1\n").unwrap();
        let again = Circuit::<f64>::parse(&c.to_text()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.digest(), again.digest());
    }
}
