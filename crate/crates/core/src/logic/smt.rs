//! SMT-LIB 2 text generation and a long-lived solver subprocess.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{parse_decimal, Rational};
use crate::terms::{to_rational_fn, Assignment, Constraint, Name, Query, Term};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot start solver '{path}': {source}")]
    Spawn {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver i/o failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver reported an error: {0}")]
    Protocol(String),
    #[error("solver exited unexpectedly")]
    Exited,
    #[error("cannot read solver value '{0}'")]
    Value(String),
}

/// Outcome of one satisfiability check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
    Unknown(String),
}

/// A backend deciding satisfiability of existentially closed conjunctions.
pub trait DecisionProcedure {
    /// Decides `∃ vars. ⋀ assertions`; on `Sat` the assignment binds every var.
    fn check(&mut self, vars: &BTreeSet<Name>, assertions: &[Constraint]) -> Result<SatResult, SolverError>;

    /// Identification string (e.g. the solver's version) recorded in reports.
    fn describe(&self) -> String;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub path: PathBuf,
    pub args: Vec<String>,
    /// Per-check timeout in milliseconds.
    pub timeout_ms: u64,
    pub seed: u64,
    /// Significant digits requested when a value is an algebraic number.
    pub precision: u32,
}

pub const DEFAULT_TIMEOUT_MS: u64 = 60_000;

impl SolverConfig {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        SolverConfig {
            path: path.into(),
            args: vec!["-in".into(), "-smt2".into()],
            timeout_ms: DEFAULT_TIMEOUT_MS,
            seed: 0,
            precision: 12,
        }
    }

    /// Solver binary from the `CBN_SOLVER` environment variable, else `z3` on `PATH`.
    pub fn from_env() -> Option<Self> {
        if let Some(p) = std::env::var_os("CBN_SOLVER").filter(|p| !p.is_empty()) {
            return Some(SolverConfig::new(PathBuf::from(p)));
        }
        find_on_path("z3").map(SolverConfig::new)
    }
}

fn find_on_path(binary: &str) -> Option<PathBuf> {
    let paths = std::env::var_os("PATH")?;
    std::env::split_paths(&paths).map(|d| d.join(binary)).find(|p| p.is_file())
}

/// SMT symbol for a model variable. A fixed prefix keeps user names clear of
/// solver built-ins such as `and` or `exp`.
pub fn smt_symbol(v: &str) -> String {
    format!("v_{v}")
}

fn write_int(out: &mut String, n: &BigInt) {
    let _ = write!(out, "{n}.0");
}

/// Exact real literal: `3.0`, `(/ 3.0 10.0)`, `(- (/ 1.0 3.0))`.
pub fn real_literal(c: &Rational) -> String {
    let mut body = String::new();
    let mag = c.abs();
    if mag.denom().is_one() {
        write_int(&mut body, mag.numer());
    } else {
        body.push_str("(/ ");
        write_int(&mut body, mag.numer());
        body.push(' ');
        write_int(&mut body, mag.denom());
        body.push(')');
    }
    if c.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn emit_term(t: &Term, out: &mut String) {
    match t {
        Term::Const(c) => out.push_str(&real_literal(c)),
        Term::Var(v) => out.push_str(&smt_symbol(v)),
        Term::Add(..) | Term::Mul(..) => {
            // flatten associative chains to keep scripts shallow
            let op = if matches!(t, Term::Add(..)) { "+" } else { "*" };
            let mut args = Vec::new();
            collect_chain(t, op, &mut args);
            let _ = write!(out, "({op}");
            for a in args {
                out.push(' ');
                emit_term(a, out);
            }
            out.push(')');
        }
        Term::Neg(a) => {
            out.push_str("(- ");
            emit_term(a, out);
            out.push(')');
        }
        Term::Sub(a, b) => {
            out.push_str("(- ");
            emit_term(a, out);
            out.push(' ');
            emit_term(b, out);
            out.push(')');
        }
        Term::Div(..) => unreachable!("division is eliminated before emission"),
    }
}

fn collect_chain<'a>(t: &'a Term, op: &str, out: &mut Vec<&'a Term>) {
    match (t, op) {
        (Term::Add(a, b), "+") | (Term::Mul(a, b), "*") => {
            collect_chain(a, op, out);
            collect_chain(b, op, out);
        }
        _ => out.push(t),
    }
}

/// Rewrites comparisons whose sides contain division: `l ⋈ r` with
/// `l - r = N/D` (`D` non-constant) becomes `N*D ⋈ 0 ∧ D ≠ 0`.
pub fn eliminate_division(c: &Constraint) -> Constraint {
    use Constraint as C;
    let atom = |l: &Term, r: &Term, mk: fn(Term, Term) -> Constraint| -> Constraint {
        if l.is_core() && r.is_core() {
            return mk(l.clone(), r.clone());
        }
        match to_rational_fn(&(l.clone() - r.clone())) {
            Ok(q) if q.is_polynomial() => mk(q.num().to_term(), Term::int(0)),
            Ok(q) => {
                let d = q.den().to_term();
                let nd = &q.num().clone() * &q.den().clone();
                mk(nd.to_term(), Term::int(0)).and(C::Eq(d, Term::int(0)).negate())
            }
            // the difference is undefined everywhere
            Err(_) => C::falsum(),
        }
    };
    match c {
        C::True => C::True,
        C::Leq(l, r) => atom(l, r, C::Leq),
        C::Lt(l, r) => atom(l, r, C::Lt),
        C::Eq(l, r) => atom(l, r, C::Eq),
        C::Geq(l, r) => atom(l, r, C::Geq),
        C::Gt(l, r) => atom(l, r, C::Gt),
        C::Not(a) => C::Not(Box::new(eliminate_division(a))),
        C::And(a, b) => C::And(Box::new(eliminate_division(a)), Box::new(eliminate_division(b))),
        C::Or(a, b) => C::Or(Box::new(eliminate_division(a)), Box::new(eliminate_division(b))),
    }
}

fn emit_primitive(c: &Constraint, out: &mut String) {
    use Constraint as C;
    let cmp = |op: &str, l: &Term, r: &Term, out: &mut String| {
        let _ = write!(out, "({op} ");
        emit_term(&l.desugar(), out);
        out.push(' ');
        emit_term(&r.desugar(), out);
        out.push(')');
    };
    match c {
        C::True => out.push_str("true"),
        C::Leq(l, r) => cmp("<=", l, r, out),
        C::Lt(l, r) => cmp("<", l, r, out),
        C::Not(a) => {
            out.push_str("(not ");
            emit_primitive(a, out);
            out.push(')');
        }
        C::And(..) => {
            out.push_str("(and");
            for k in c.conjuncts() {
                out.push(' ');
                emit_primitive(k, out);
            }
            out.push(')');
        }
        _ => unreachable!("derived operators are expanded before emission"),
    }
}

/// SMT-LIB text of a constraint using only `true`, `<=`, `<`, `not`, `and`.
pub fn emit_constraint(c: &Constraint) -> String {
    let mut out = String::new();
    emit_primitive(&eliminate_division(c).to_primitive(), &mut out);
    out
}

/// Complete stand-alone script for a prenex-existential query: one real constant
/// per bound variable, one assertion per top-level conjunct, then `check-sat`
/// and `get-value`. Returns `None` for queries outside that fragment.
pub fn emit_script(q: &Query) -> Option<String> {
    let (vars, matrix) = q.as_prenex_existential()?;
    let mut out = String::from("(set-logic QF_NRA)\n");
    for v in &vars {
        let _ = writeln!(out, "(declare-const {} Real)", smt_symbol(v));
    }
    for c in matrix.conjuncts() {
        let _ = writeln!(out, "(assert {})", emit_constraint(c));
    }
    out.push_str("(check-sat)\n");
    if !vars.is_empty() {
        let symbols: Vec<String> = vars.iter().map(|v| smt_symbol(v)).collect();
        let _ = writeln!(out, "(get-value ({}))", symbols.join(" "));
    }
    Some(out)
}

/// A solver subprocess spoken to over stdin/stdout; each check runs in its own
/// `push`/`pop` scope.
pub struct SmtSolver {
    config: SolverConfig,
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    version: String,
    checks: usize,
}

impl SmtSolver {
    pub fn start(config: SolverConfig) -> Result<SmtSolver, SolverError> {
        let mut child = Command::new(&config.path)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SolverError::Spawn { path: config.path.clone(), source })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut s = SmtSolver { config, child, stdin, stdout, version: String::new(), checks: 0 };
        let preamble = format!(
            "(set-option :print-success false)\n(set-option :random-seed {})\n(set-logic QF_NRA)\n(set-option :timeout {})\n",
            s.config.seed, s.config.timeout_ms
        );
        s.send(&preamble)?;
        s.send("(get-info :version)\n")?;
        let info = s.read_sexpr()?;
        s.version = info
            .split('"')
            .nth(1)
            .map(|v| format!("{} {v}", s.config.path.file_name().map_or("solver".into(), |f| f.to_string_lossy())))
            .unwrap_or(info);
        Ok(s)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn path(&self) -> &Path {
        &self.config.path
    }

    /// Number of satisfiability checks issued so far.
    pub fn checks(&self) -> usize {
        self.checks
    }

    fn send(&mut self, text: &str) -> Result<(), SolverError> {
        self.stdin.write_all(text.as_bytes()).map_err(|_| SolverError::Exited)?;
        self.stdin.flush().map_err(|_| SolverError::Exited)
    }

    /// Reads one balanced s-expression or bare token.
    fn read_sexpr(&mut self) -> Result<String, SolverError> {
        let mut buf = String::new();
        let mut depth = 0i64;
        let mut started = false;
        let mut in_string = false;
        let mut in_quote = false;
        loop {
            let mut line = String::new();
            if self.stdout.read_line(&mut line)? == 0 {
                return Err(SolverError::Exited);
            }
            for ch in line.chars() {
                match ch {
                    '"' if !in_quote => in_string = !in_string,
                    '|' if !in_string => in_quote = !in_quote,
                    '(' if !in_string && !in_quote => {
                        depth += 1;
                        started = true;
                    }
                    ')' if !in_string && !in_quote => depth -= 1,
                    c if !c.is_whitespace() => started = true,
                    _ => {}
                }
            }
            buf.push_str(&line);
            if started && depth <= 0 && !in_string {
                return Ok(buf.trim().to_string());
            }
        }
    }

    fn get_values(&mut self, symbols: &[(String, Name)], decimal: bool) -> Result<Vec<(Name, Option<Rational>)>, SolverError> {
        if decimal {
            self.send(&format!(
                "(set-option :pp.decimal true)\n(set-option :pp.decimal_precision {})\n",
                self.config.precision
            ))?;
        }
        let list: Vec<&str> = symbols.iter().map(|(s, _)| s.as_str()).collect();
        self.send(&format!("(get-value ({}))\n", list.join(" ")))?;
        let text = self.read_sexpr()?;
        if decimal {
            self.send("(set-option :pp.decimal false)\n")?;
        }
        if text.starts_with("(error") {
            return Err(SolverError::Protocol(text));
        }
        let parsed = parse_sexpr(&text).ok_or_else(|| SolverError::Value(text.clone()))?;
        let Sexpr::List(pairs) = parsed else { return Err(SolverError::Value(text)) };
        let mut out = Vec::new();
        for pair in pairs {
            let Sexpr::List(kv) = pair else { return Err(SolverError::Value(text)) };
            let [Sexpr::Atom(sym), value] = kv.as_slice() else { return Err(SolverError::Value(text)) };
            let sym = sym.trim_matches('|');
            let name = symbols
                .iter()
                .find(|(s, _)| s == sym)
                .map(|(_, n)| n.clone())
                .ok_or_else(|| SolverError::Value(text.clone()))?;
            out.push((name, value_of(value)));
        }
        Ok(out)
    }
}

impl DecisionProcedure for SmtSolver {
    fn check(&mut self, vars: &BTreeSet<Name>, assertions: &[Constraint]) -> Result<SatResult, SolverError> {
        self.checks += 1;
        let mut script = String::from("(push 1)\n");
        let symbols: Vec<(String, Name)> = vars.iter().map(|v| (smt_symbol(v), v.clone())).collect();
        for (s, _) in &symbols {
            let _ = writeln!(script, "(declare-const {s} Real)");
        }
        for c in assertions {
            for k in c.conjuncts() {
                let _ = writeln!(script, "(assert {})", emit_constraint(k));
            }
        }
        script.push_str("(check-sat)\n");
        self.send(&script)?;
        let status = self.read_sexpr()?;
        let result = match status.as_str() {
            "sat" => {
                let mut values = Assignment::new();
                if !symbols.is_empty() {
                    let exact = self.get_values(&symbols, false)?;
                    let missing: Vec<(String, Name)> = exact
                        .iter()
                        .filter(|(_, v)| v.is_none())
                        .map(|(n, _)| (smt_symbol(n), n.clone()))
                        .collect();
                    for (n, v) in exact {
                        if let Some(v) = v {
                            values.insert(n, v);
                        }
                    }
                    if !missing.is_empty() {
                        for (n, v) in self.get_values(&missing, true)? {
                            let v = v.ok_or_else(|| SolverError::Value(format!("no decimal value for '{n}'")))?;
                            values.insert(n, v);
                        }
                    }
                }
                SatResult::Sat(values)
            }
            "unsat" => SatResult::Unsat,
            "unknown" => {
                self.send("(get-info :reason-unknown)\n")?;
                let reason = self.read_sexpr()?;
                SatResult::Unknown(reason.split('"').nth(1).unwrap_or("unknown").to_string())
            }
            other => {
                let _ = self.send("(pop 1)\n");
                return Err(SolverError::Protocol(other.to_string()));
            }
        };
        self.send("(pop 1)\n")?;
        Ok(result)
    }

    fn describe(&self) -> String {
        self.version.clone()
    }
}

impl Drop for SmtSolver {
    fn drop(&mut self) {
        let _ = self.send("(exit)\n");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

fn parse_sexpr(text: &str) -> Option<Sexpr> {
    fn tokens(text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = String::new();
        let mut quoted = false;
        for ch in text.chars() {
            if quoted {
                cur.push(ch);
                if ch == '|' {
                    quoted = false;
                }
                continue;
            }
            match ch {
                '(' | ')' => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    out.push(ch.to_string());
                }
                '|' => {
                    quoted = true;
                    cur.push(ch);
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }
    fn parse(tokens: &[String], pos: &mut usize) -> Option<Sexpr> {
        let tok = tokens.get(*pos)?;
        *pos += 1;
        match tok.as_str() {
            "(" => {
                let mut items = Vec::new();
                loop {
                    if tokens.get(*pos)? == ")" {
                        *pos += 1;
                        return Some(Sexpr::List(items));
                    }
                    items.push(parse(tokens, pos)?);
                }
            }
            ")" => None,
            atom => Some(Sexpr::Atom(atom.to_string())),
        }
    }
    let toks = tokens(text);
    let mut pos = 0;
    let e = parse(&toks, &mut pos)?;
    (pos == toks.len()).then_some(e)
}

/// Exact value of a numeral, decimal (`1.5`, `1.414213562373?`), negation or
/// quotient; `None` for algebraic numbers (`root-obj`) and anything else.
fn value_of(e: &Sexpr) -> Option<Rational> {
    match e {
        Sexpr::Atom(a) => parse_decimal(a.trim_end_matches('?')),
        Sexpr::List(items) => match items.as_slice() {
            [Sexpr::Atom(op), x] if op == "-" => value_of(x).map(|v| -v),
            [Sexpr::Atom(op), x, y] if op == "/" => {
                let (x, y) = (value_of(x)?, value_of(y)?);
                (!y.is_zero()).then(|| x / y)
            }
            _ => None,
        },
    }
}
