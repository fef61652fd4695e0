use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::real::Real;

/// OPENQASM 2.0 subset: one register `q`, gates `u` and `cx`, with the
/// global phase recorded on a comment line.
pub fn emit_qasm<T: Real>(c: &Circuit<T>) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    out.push_str(&format!("// global_phase: {}\n", c.global_phase));
    out.push_str("// convention: big-endian, qubit 0 is the most significant bit\n");
    out.push_str(&format!("qreg q[{}];\n", c.n));
    for g in &c.gates {
        match *g {
            Gate::U { q, theta, phi, lambda } => {
                out.push_str(&format!("u({theta},{phi},{lambda}) q[{q}];\n"))
            }
            Gate::Cx { control, target } => {
                out.push_str(&format!("cx q[{control}],q[{target}];\n"))
            }
        }
    }
    out
}

struct LineParser {
    line: usize,
}

impl LineParser {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::ParseError { line: self.line, msg: msg.into() }
    }

    fn qubit_ref(&self, tok: &str, n: usize) -> Result<usize> {
        let tok = tok.trim();
        let inner = tok
            .strip_prefix("q[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| self.err(format!("expected q[<index>], got '{tok}'")))?;
        let idx: usize =
            inner.trim().parse().map_err(|_| self.err(format!("bad qubit index '{inner}'")))?;
        if idx >= n {
            return Err(self.err(format!("qubit index {idx} out of range for q[{n}]")));
        }
        Ok(idx)
    }

    fn angle<T: Real>(&self, tok: &str) -> Result<T> {
        let v: f64 =
            tok.trim().parse().map_err(|_| self.err(format!("bad angle '{}'", tok.trim())))?;
        Ok(T::of(v))
    }
}

pub fn parse_qasm<T: Real>(text: &str) -> Result<Circuit<T>> {
    let mut header_seen = false;
    let mut circuit: Option<Circuit<T>> = None;
    let mut global_phase: Option<T> = None;

    for (idx, raw) in text.lines().enumerate() {
        let p = LineParser { line: idx + 1 };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix("//") {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("global_phase:") {
                global_phase =
                    Some(v.trim().parse::<f64>().map(T::of).map_err(|_| {
                        p.err(format!("bad global phase '{}'", v.trim()))
                    })?);
            }
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| p.err("missing trailing ';'"))?
            .trim();
        if !header_seen {
            if stmt == "OPENQASM 2.0" {
                header_seen = true;
                continue;
            }
            return Err(p.err("expected 'OPENQASM 2.0;' header"));
        }
        if stmt.starts_with("include") {
            continue;
        }
        if let Some(rest) = stmt.strip_prefix("qreg") {
            if circuit.is_some() {
                return Err(p.err("duplicate qreg declaration"));
            }
            let rest = rest.trim();
            let inner = rest
                .strip_prefix("q[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| p.err(format!("expected qreg q[<n>], got '{rest}'")))?;
            let n: usize =
                inner.trim().parse().map_err(|_| p.err(format!("bad register size '{inner}'")))?;
            if n < 1 {
                return Err(p.err("register must hold at least one qubit"));
            }
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| p.err("gate before qreg declaration"))?;
        if let Some(rest) = stmt.strip_prefix("u(") {
            let (args, tail) =
                rest.split_once(')').ok_or_else(|| p.err("unterminated angle list"))?;
            let angles: Vec<&str> = args.split(',').collect();
            if angles.len() != 3 {
                return Err(p.err(format!("u expects 3 angles, got {}", angles.len())));
            }
            let theta: T = p.angle(angles[0])?;
            let phi: T = p.angle(angles[1])?;
            let lambda: T = p.angle(angles[2])?;
            let q = p.qubit_ref(tail, c.n)?;
            c.gates.push(Gate::U { q, theta, phi, lambda });
        } else if let Some(rest) = stmt.strip_prefix("cx ") {
            let args: Vec<&str> = rest.split(',').collect();
            if args.len() != 2 {
                return Err(p.err("cx expects 2 qubits"));
            }
            let control = p.qubit_ref(args[0], c.n)?;
            let target = p.qubit_ref(args[1], c.n)?;
            if control == target {
                return Err(p.err("cx control equals target"));
            }
            c.gates.push(Gate::Cx { control, target });
        } else {
            let name = stmt.split(|ch: char| ch == '(' || ch.is_whitespace()).next().unwrap_or("");
            return Err(p.err(format!("unsupported statement '{name}'")));
        }
    }

    let mut c = circuit.ok_or_else(|| Error::ParseError {
        line: text.lines().count().max(1),
        msg: "no qreg declaration found".into(),
    })?;
    if let Some(gp) = global_phase {
        c.global_phase = gp;
    }
    Ok(c)
}
