//! Line-oriented text formats for theories, sequences, templates and tasks.
//!
//! Every non-blank line holds one item; `#` starts a comment. Names are
//! case-insensitive and stored lower-case.

use std::collections::BTreeSet;

use super::{
    canon, is_ident, Atom, Constraint, LangError, Result, Rule, RuleKind, SensorySequence, Template, Theory,
    TypeSignature,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Type(String),
    Object(String, String),
    Pred(String, Vec<String>),
    Var(String, String),
    Permanent(String),
    Init(Atom),
    Fact(Atom),
    Rule(RuleKind, Vec<Atom>, Atom),
    Xor(Vec<String>),
    Xor2(Vec<String>),
    Unique(String),
    At(usize, BTreeSet<Atom>),
    Hidden(usize, BTreeSet<Atom>),
    Kind(String),
    TemplateRef(String),
    Static(usize),
    Causal(usize),
    Body(usize),
    Separator,
}

/// A parsed file: items tagged with their 1-based line numbers.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub items: Vec<(usize, Item)>,
}

fn err(line: usize, msg: impl Into<String>) -> LangError {
    LangError::Parse { line, msg: msg.into() }
}

fn ident(line: usize, s: &str) -> Result<String> {
    if is_ident(s) {
        Ok(canon(s))
    } else {
        Err(err(line, format!("expected an identifier, found `{s}`")))
    }
}

fn count(line: usize, s: &str) -> Result<usize> {
    s.parse().map_err(|_| err(line, format!("expected a number, found `{s}`")))
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Scanner {
            chars: src.char_indices().peekable(),
            src,
            line,
        }
    }

    fn skip_separators(&mut self) {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() || c == ',' {
                self.chars.next();
            } else {
                break;
            }
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() {
                self.chars.next();
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.chars.peek().is_none()
    }

    fn word(&mut self) -> Result<String> {
        self.skip_ws();
        let start = match self.chars.peek() {
            Some(&(i, _)) => i,
            None => return Err(err(self.line, "unexpected end of line")),
        };
        let mut end = start;
        while let Some(&(i, c)) = self.chars.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                end = i + c.len_utf8();
                self.chars.next();
            } else {
                break;
            }
        }
        ident(self.line, &self.src[start..end])
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, c)) if c == want => Ok(()),
            Some((_, c)) => Err(err(self.line, format!("expected `{want}`, found `{c}`"))),
            None => Err(err(self.line, format!("expected `{want}`"))),
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn atom(&mut self) -> Result<Atom> {
        let pred = self.word()?;
        self.expect('(')?;
        let mut args = vec![self.word()?];
        self.skip_ws();
        if self.peek() == Some(',') {
            self.chars.next();
            args.push(self.word()?);
        }
        self.expect(')')?;
        Ok(Atom { pred, args })
    }

    /// Atoms separated by whitespace or commas, up to the end or a `}`.
    fn atoms_until(&mut self, close: Option<char>) -> Result<Vec<Atom>> {
        let mut out = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                None if close.is_none() => return Ok(out),
                None => return Err(err(self.line, "unterminated atom list")),
                Some(c) if Some(c) == close => {
                    self.chars.next();
                    return Ok(out);
                }
                Some(_) => out.push(self.atom()?),
            }
        }
    }
}

pub fn parse_atom(text: &str) -> Result<Atom> {
    let mut sc = Scanner::new(text.trim(), 1);
    let a = sc.atom()?;
    sc.skip_ws();
    if !sc.at_end() {
        return Err(err(1, format!("trailing text after `{a}`")));
    }
    Ok(a)
}

fn parse_state(line: usize, rest: &str) -> Result<(usize, BTreeSet<Atom>)> {
    let rest = rest.trim_start();
    let split = rest.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(rest.len());
    let t = count(line, &rest[..split])?;
    if t == 0 {
        return Err(err(line, "time-steps start at 1"));
    }
    let mut sc = Scanner::new(&rest[split..], line);
    sc.expect('{')?;
    let atoms = sc.atoms_until(Some('}'))?;
    sc.skip_ws();
    if !sc.at_end() {
        return Err(err(line, "text after `}`"));
    }
    Ok((t, atoms.into_iter().collect()))
}

fn parse_rule(line: usize, rest: &str) -> Result<Item> {
    let (kind, idx) = match (rest.find(">>"), rest.find("->")) {
        (Some(i), None) => (RuleKind::Causal, i),
        (None, Some(i)) => (RuleKind::Static, i),
        _ => return Err(err(line, "a rule needs exactly one of `>>` or `->`")),
    };
    let body = Scanner::new(&rest[..idx], line).atoms_until(None)?;
    let mut sc = Scanner::new(&rest[idx + 2..], line);
    let head = sc.atom()?;
    sc.skip_ws();
    if !sc.at_end() {
        return Err(err(line, "a rule has a single head atom"));
    }
    Ok(Item::Rule(kind, body, head))
}

fn parse_line(line: usize, text: &str) -> Result<Option<Item>> {
    let text = match text.find('#') {
        Some(i) => &text[..i],
        None => text,
    }
    .trim();
    if text.is_empty() {
        return Ok(None);
    }
    if text == "---" {
        return Ok(Some(Item::Separator));
    }
    let (kw, rest) = match text.find(char::is_whitespace) {
        Some(i) => (&text[..i], text[i..].trim()),
        None => (text, ""),
    };
    let words: Vec<&str> = rest.split_whitespace().collect();
    let nwords = |n: usize| -> Result<()> {
        if words.len() == n {
            Ok(())
        } else {
            Err(err(line, format!("`{kw}` takes {n} argument(s)")))
        }
    };
    let item = match kw.to_ascii_lowercase().as_str() {
        "type" => {
            nwords(1)?;
            Item::Type(ident(line, words[0])?)
        }
        "object" => {
            nwords(2)?;
            Item::Object(ident(line, words[0])?, ident(line, words[1])?)
        }
        "var" => {
            nwords(2)?;
            Item::Var(ident(line, words[0])?, ident(line, words[1])?)
        }
        "pred" => {
            let open = rest.find('(').ok_or_else(|| err(line, "expected `pred name(type,...)`"))?;
            let close = rest.rfind(')').ok_or_else(|| err(line, "missing `)`"))?;
            if close < open || !rest[close + 1..].trim().is_empty() {
                return Err(err(line, "malformed predicate declaration"));
            }
            let name = ident(line, rest[..open].trim())?;
            let tys = rest[open + 1..close]
                .split(',')
                .map(|t| ident(line, t.trim()))
                .collect::<Result<Vec<_>>>()?;
            Item::Pred(name, tys)
        }
        "permanent" => {
            nwords(1)?;
            Item::Permanent(ident(line, words[0])?)
        }
        "init" => Item::Init(parse_atom(rest).map_err(|e| relocate(e, line))?),
        "fact" => Item::Fact(parse_atom(rest).map_err(|e| relocate(e, line))?),
        "rule" => parse_rule(line, rest)?,
        "xor" | "xor2" => {
            if words.len() < 2 {
                return Err(err(line, "an exclusion needs at least two predicates"));
            }
            let ps = words.iter().map(|w| ident(line, w)).collect::<Result<Vec<_>>>()?;
            if kw.eq_ignore_ascii_case("xor") {
                Item::Xor(ps)
            } else {
                Item::Xor2(ps)
            }
        }
        "unique" => {
            nwords(1)?;
            Item::Unique(ident(line, words[0])?)
        }
        "at" => {
            let (t, atoms) = parse_state(line, rest)?;
            Item::At(t, atoms)
        }
        "hidden" => {
            let (t, atoms) = parse_state(line, rest)?;
            Item::Hidden(t, atoms)
        }
        "kind" => {
            nwords(1)?;
            Item::Kind(canon(words[0]))
        }
        "template" => {
            if rest.is_empty() {
                return Err(err(line, "`template` needs a file reference"));
            }
            Item::TemplateRef(rest.to_string())
        }
        "static" => {
            nwords(1)?;
            Item::Static(count(line, words[0])?)
        }
        "causal" => {
            nwords(1)?;
            Item::Causal(count(line, words[0])?)
        }
        "body" => {
            nwords(1)?;
            Item::Body(count(line, words[0])?)
        }
        other => return Err(err(line, format!("unknown keyword `{other}`"))),
    };
    Ok(Some(item))
}

fn relocate(e: LangError, line: usize) -> LangError {
    match e {
        LangError::Parse { msg, .. } => LangError::Parse { line, msg },
        other => other,
    }
}

fn at_line(line: usize, e: LangError) -> LangError {
    match e {
        LangError::Parse { .. } => e,
        other => err(line, other.to_string()),
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut items = Vec::new();
        for (i, l) in text.lines().enumerate() {
            if let Some(item) = parse_line(i + 1, l)? {
                items.push((i + 1, item));
            }
        }
        Ok(Document { items })
    }

    /// Splits on `---` separators.
    pub fn blocks(&self) -> Vec<Document> {
        let mut out = vec![Document::default()];
        for (l, it) in &self.items {
            if *it == Item::Separator {
                out.push(Document::default());
            } else {
                out.last_mut().unwrap().items.push((*l, it.clone()));
            }
        }
        out.retain(|d| !d.items.is_empty());
        out
    }

    /// Builds the signature from the declaration items, in dependency order.
    pub fn signature(&self) -> Result<TypeSignature> {
        let mut sig = TypeSignature::new();
        for (l, it) in &self.items {
            if let Item::Type(t) = it {
                sig.add_type(t).map_err(|e| at_line(*l, e))?;
            }
        }
        for (l, it) in &self.items {
            let r = match it {
                Item::Object(o, t) => sig.add_object(o, t),
                Item::Pred(p, tys) => {
                    let tys: Vec<&str> = tys.iter().map(String::as_str).collect();
                    sig.add_pred(p, &tys)
                }
                Item::Var(v, t) => sig.add_var(v, t),
                _ => Ok(()),
            };
            r.map_err(|e| at_line(*l, e))?;
        }
        for (l, it) in &self.items {
            if let Item::Permanent(p) = it {
                sig.set_permanent(p).map_err(|e| at_line(*l, e))?;
            }
        }
        Ok(sig)
    }

    /// Sequence from `at` items; `len` forces a minimum length.
    pub fn sequence(&self, sig: Option<&TypeSignature>) -> Result<SensorySequence> {
        states_from(&self.items, sig, |it| match it {
            Item::At(t, a) => Some((*t, a)),
            _ => None,
        })
    }

    pub fn hidden(&self, sig: Option<&TypeSignature>) -> Result<SensorySequence> {
        states_from(&self.items, sig, |it| match it {
            Item::Hidden(t, a) => Some((*t, a)),
            _ => None,
        })
    }
}

fn states_from<'a>(
    items: &'a [(usize, Item)],
    sig: Option<&TypeSignature>,
    pick: impl Fn(&'a Item) -> Option<(usize, &'a BTreeSet<Atom>)>,
) -> Result<SensorySequence> {
    let mut steps: Vec<BTreeSet<Atom>> = Vec::new();
    for (l, it) in items {
        if let Some((t, atoms)) = pick(it) {
            if steps.len() < t {
                steps.resize(t, BTreeSet::new());
            }
            for a in atoms {
                if let Some(sig) = sig {
                    sig.check_ground(a).map_err(|e| at_line(*l, e))?;
                }
                steps[t - 1].insert(a.clone());
            }
        }
    }
    Ok(SensorySequence { steps })
}

pub fn parse_theory(text: &str) -> Result<Theory> {
    let doc = Document::parse(text)?;
    let sig = doc.signature()?;
    let mut th = Theory::new(sig);
    for (l, it) in &doc.items {
        let l = *l;
        let sig = &th.signature;
        match it {
            Item::Type(_) | Item::Object(..) | Item::Pred(..) | Item::Var(..) | Item::Permanent(_) => {}
            Item::Init(a) => {
                sig.check_ground(a).map_err(|e| at_line(l, e))?;
                th.inits.insert(a.clone());
            }
            Item::Fact(a) => {
                sig.check_ground(a).map_err(|e| at_line(l, e))?;
                th.facts.insert(a.clone());
            }
            Item::Rule(kind, body, head) => {
                let r = Rule::new(*kind, body.clone(), head.clone());
                r.validate(sig).map_err(|e| at_line(l, e))?;
                th.rules.insert(r);
            }
            Item::Xor(ps) | Item::Xor2(ps) => {
                let ps: Vec<&str> = ps.iter().map(String::as_str).collect();
                let c = Constraint::xor(sig, &ps).map_err(|e| at_line(l, e))?;
                let binary = matches!(c, Constraint::XorBinary { .. });
                if binary != matches!(it, Item::Xor2(_)) {
                    return Err(err(l, "use `xor` for unary and `xor2` for binary predicates"));
                }
                th.constraints.insert(c);
            }
            Item::Unique(p) => {
                let c = Constraint::unique(sig, p).map_err(|e| at_line(l, e))?;
                th.constraints.insert(c);
            }
            _ => return Err(err(l, "item not allowed in a theory")),
        }
    }
    th.validate()?;
    Ok(th)
}

/// Parses `at t { ... }` lines; other declarations are rejected.
pub fn parse_sequence(text: &str) -> Result<SensorySequence> {
    let doc = Document::parse(text)?;
    for (l, it) in &doc.items {
        if !matches!(it, Item::At(..)) {
            return Err(err(*l, "only `at` lines are allowed in a sequence"));
        }
    }
    doc.sequence(None)
}

/// Parses one or more templates separated by `---` lines.
pub fn parse_templates(text: &str) -> Result<Vec<Template>> {
    let doc = Document::parse(text)?;
    let mut out = Vec::new();
    for block in doc.blocks() {
        let sig = block.signature()?;
        let (mut ns, mut nc, mut nb) = (None, None, None);
        let first = block.items.first().map(|(l, _)| *l).unwrap_or(1);
        for (l, it) in &block.items {
            match it {
                Item::Type(_) | Item::Object(..) | Item::Pred(..) | Item::Var(..) | Item::Permanent(_) => {}
                Item::Static(n) => ns = Some(*n),
                Item::Causal(n) => nc = Some(*n),
                Item::Body(n) => nb = Some(*n),
                _ => return Err(err(*l, "item not allowed in a template")),
            }
        }
        let t = Template {
            signature: sig,
            n_static: ns.unwrap_or(0),
            n_causal: nc.ok_or_else(|| err(first, "template lacks a `causal N` line"))?,
            n_body: nb.ok_or_else(|| err(first, "template lacks a `body N` line"))?,
        };
        t.validate().map_err(|e| at_line(first, e))?;
        out.push(t);
    }
    if out.is_empty() {
        return Err(err(1, "no templates found"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "
        # two sensors
        type sensor
        object a sensor
        object b sensor
        pred on(sensor)
        pred off(sensor)
        pred p1(sensor)
        pred p2(sensor)
        pred p3(sensor)
        pred r(sensor,sensor)
        var X sensor
        init p1(b)
        init p2(a)
        init r(a,b)
        init r(b,a)
        rule p1(X) >> p2(X)
        rule p2(X) >> p3(X)
        rule p3(X) >> p1(X)
        rule p1(X) -> on(X)
        rule p2(X) -> on(X)
        rule p3(X) -> off(X)
        xor on off
        xor p1 p2 p3
        unique r
    ";

    #[test]
    fn theory_round_trip() {
        let th = parse_theory(EX1).unwrap();
        assert_eq!(th.inits.len(), 4);
        assert_eq!(th.rules.len(), 6);
        assert_eq!(th.constraints.len(), 3);
        let text = th.to_string();
        let again = parse_theory(&text).unwrap();
        assert_eq!(th, again);
        assert_eq!(text, again.to_string());
    }

    #[test]
    fn case_is_folded() {
        let th = parse_theory("TYPE S\nOBJECT A s\npred ON(s)\npred Off(S)\nINIT on(a)\nxor ON off\n").unwrap();
        assert!(th.inits.contains(&Atom::unary("on", "a")));
    }

    #[test]
    fn sequence_round_trip_keeps_empty_states() {
        let s = parse_sequence("at 2 { off(a) on(b) }\nat 4 { }\n").unwrap();
        assert_eq!(s.len(), 4);
        assert!(s.at(1).is_empty());
        let text = s.to_string();
        assert_eq!(text, "at 1 { }\nat 2 { off(a) on(b) }\nat 3 { }\nat 4 { }\n");
        assert_eq!(parse_sequence(&text).unwrap(), s);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_theory("type s\nobject a s\npred on(s)\ninit on(zz)\n").unwrap_err();
        assert!(matches!(e, LangError::Parse { line: 4, .. }), "{e:?}");
        let e = parse_templates("type s\npred on(s)\ncausal 1\nbody 0\n").unwrap_err();
        assert!(matches!(e, LangError::Parse { .. }), "{e:?}");
        let e = parse_theory("type s\nfrobnicate\n").unwrap_err();
        assert!(matches!(e, LangError::Parse { line: 2, .. }), "{e:?}");
    }

    #[test]
    fn mixed_rule_atoms_rejected() {
        let e = parse_theory("type s\nobject a s\npred on(s)\npred r(s,s)\nvar x s\nrule r(x,a) >> on(x)\n");
        assert!(e.is_err());
    }

    #[test]
    fn templates_split_on_separators() {
        let ts = parse_templates("type s\npred on(s)\ncausal 1\nbody 1\n---\ntype s\npred on(s)\nstatic 1\ncausal 2\nbody 3\n")
            .unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!((ts[1].n_static, ts[1].n_causal, ts[1].n_body), (1, 2, 3));
        let text = super::super::write_templates(&ts);
        assert_eq!(parse_templates(&text).unwrap(), ts);
    }
}
