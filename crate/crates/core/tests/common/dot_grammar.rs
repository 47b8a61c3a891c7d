//! A recursive-descent recogniser for the Graphviz DOT language (graphs,
//! statements, attribute lists, subgraphs, edges), used as an oracle for
//! the exporter. Ports and HTML strings are not needed and not accepted.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = vec![];
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        s.push(*cs.get(i + 1).ok_or("dangling escape")?);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c == '-' && matches!(cs.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::Sym(if cs[i + 1] == '>' { "->" } else { "--" }));
            i += 2;
        } else if let Some(sym) = ["{", "}", "[", "]", "=", ";", ","].into_iter().find(|s| s.starts_with(c)) {
            out.push(Tok::Sym(sym));
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Id(cs[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Id(cs[start..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
    edge_op: &'static str,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Id(x)) if x.eq_ignore_ascii_case(k))
    }

    fn sym(&mut self, s: &str) -> Result<(), String> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected {s} at token {}", self.pos))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(format!("expected an identifier at token {}", self.pos)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.is_kw("strict") {
            self.pos += 1;
        }
        if self.is_kw("digraph") {
            self.edge_op = "->";
        } else if self.is_kw("graph") {
            self.edge_op = "--";
        } else {
            return Err("expected graph or digraph".into());
        }
        self.pos += 1;
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.pos += 1;
        }
        self.sym("{")?;
        self.stmt_list()?;
        self.sym("}")?;
        if self.pos != self.toks.len() {
            return Err("trailing tokens".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !self.is_sym("}") {
            if self.peek().is_none() {
                return Err("unexpected end".into());
            }
            self.stmt()?;
            if self.is_sym(";") {
                self.pos += 1;
            }
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<(), String> {
        self.sym("[")?;
        while !self.is_sym("]") {
            self.id()?;
            self.sym("=")?;
            self.id()?;
            if self.is_sym(";") || self.is_sym(",") {
                self.pos += 1;
            }
        }
        self.sym("]")?;
        if self.is_sym("[") {
            self.attr_list()?;
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if self.is_kw("subgraph") {
            self.pos += 1;
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.pos += 1;
            }
        }
        self.sym("{")?;
        self.stmt_list()?;
        self.sym("}")
    }

    /// A node id or a subgraph, as found on either side of an edge.
    fn endpoint(&mut self) -> Result<(), String> {
        if self.is_kw("subgraph") || self.is_sym("{") {
            self.subgraph()
        } else {
            self.id().map(|_| ())
        }
    }

    fn stmt(&mut self) -> Result<(), String> {
        if self.is_kw("graph") || self.is_kw("node") || self.is_kw("edge") {
            self.pos += 1;
            return self.attr_list();
        }
        let simple_id = matches!(self.peek(), Some(Tok::Id(_))) && !self.is_kw("subgraph");
        if simple_id && matches!(self.toks.get(self.pos + 1), Some(Tok::Sym("="))) {
            self.pos += 2;
            return self.id().map(|_| ());
        }
        self.endpoint()?;
        let mut edge = false;
        while self.is_sym("->") || self.is_sym("--") {
            if !self.is_sym(self.edge_op) {
                return Err("edge operator does not match the graph kind".into());
            }
            self.pos += 1;
            self.endpoint()?;
            edge = true;
        }
        if !edge && !simple_id {
            // A bare subgraph statement.
            return Ok(());
        }
        if self.is_sym("[") {
            self.attr_list()?;
        }
        Ok(())
    }
}

/// Whether `src` is a DOT graph.
pub fn check(src: &str) -> Result<(), String> {
    P { toks: lex(src)?, pos: 0, edge_op: "->" }.graph()
}

/// Known-good and known-bad inputs for the recogniser itself.
pub fn self_check() {
    assert!(check("digraph { a -> b [label=\"x\"]; subgraph cluster_0 { style=dashed; c } }").is_ok());
    assert!(check("digraph g { { rank=sink; a; b; } a -> b -> c [style=invis]; }").is_ok());
    assert!(check("digraph { a -- b }").is_err());
    assert!(check("digraph { a -> }").is_err());
    assert!(check("digraph { a [label=] }").is_err());
    assert!(check("digraph { \"unterminated }").is_err());
    assert!(check("digraph { } }").is_err());
}
