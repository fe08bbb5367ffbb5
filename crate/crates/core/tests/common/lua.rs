//! Reader for the Lua subset the exporter writes: `--` comments, one
//! `return` of a table built from strings, numbers, booleans, `nil` and
//! nested tables with positional, `name =` or `["key"] =` fields.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum Lua {
    Nil,
    Bool(bool),
    Number(f64),
    Str(String),
    Table {
        array: Vec<Lua>,
        fields: BTreeMap<String, Lua>,
    },
}

impl Lua {
    pub fn get(&self, key: &str) -> Option<&Lua> {
        match self {
            Lua::Table { fields, .. } => fields.get(key),
            _ => None,
        }
    }

    pub fn items(&self) -> &[Lua] {
        match self {
            Lua::Table { array, .. } => array,
            _ => &[],
        }
    }

    pub fn fields(&self) -> Option<&BTreeMap<String, Lua>> {
        match self {
            Lua::Table { fields, .. } => Some(fields),
            _ => None,
        }
    }

    pub fn num(&self) -> Option<f64> {
        match self {
            Lua::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn str(&self) -> Option<&str> {
        match self {
            Lua::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn numbers(&self) -> Vec<f64> {
        self.items().iter().filter_map(Lua::num).collect()
    }
}

struct Reader<'a> {
    src: &'a [u8],
    pos: usize,
}

type Res<T> = Result<T, String>;

impl Reader<'_> {
    fn err<T>(&self, what: &str) -> Res<T> {
        Err(format!("{what} at byte {}", self.pos))
    }

    fn skip(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.src[self.pos..].starts_with(b"--") {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Res<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected {:?}", c as char))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            self.pos = start;
            return None;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn string(&mut self) -> Res<String> {
        self.expect(b'"')?;
        let mut out = Vec::new();
        loop {
            let Some(&c) = self.src.get(self.pos) else {
                return self.err("unterminated string");
            };
            self.pos += 1;
            match c {
                b'"' => break,
                b'\\' => {
                    let Some(&e) = self.src.get(self.pos) else {
                        return self.err("dangling escape");
                    };
                    self.pos += 1;
                    match e {
                        b'n' => out.push(b'\n'),
                        b'r' => out.push(b'\r'),
                        b't' => out.push(b'\t'),
                        b'"' | b'\\' | b'\'' => out.push(e),
                        b'0'..=b'9' => {
                            let mut v = u32::from(e - b'0');
                            for _ in 0..2 {
                                match self.src.get(self.pos) {
                                    Some(d @ b'0'..=b'9') => {
                                        v = v * 10 + u32::from(d - b'0');
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                            out.push(u8::try_from(v).map_err(|_| "escape out of range".to_string())?);
                        }
                        _ => return self.err("unknown escape"),
                    }
                }
                b'\n' => return self.err("newline in string"),
                _ => out.push(c),
            }
        }
        String::from_utf8(out).map_err(|e| e.to_string())
    }

    fn number(&mut self) -> Res<f64> {
        self.skip();
        let start = self.pos;
        while self.pos < self.src.len()
            && matches!(self.src[self.pos], b'0'..=b'9' | b'.' | b'e' | b'E' | b'+' | b'-')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().or_else(|_| self.err(&format!("bad number {text:?}")))
    }

    fn value(&mut self) -> Res<Lua> {
        match self.peek() {
            Some(b'{') => self.table(),
            Some(b'"') => self.string().map(Lua::Str),
            Some(b'-' | b'0'..=b'9' | b'.') => self.number().map(Lua::Number),
            Some(_) => match self.ident().as_deref() {
                Some("true") => Ok(Lua::Bool(true)),
                Some("false") => Ok(Lua::Bool(false)),
                Some("nil") => Ok(Lua::Nil),
                _ => self.err("expected a value"),
            },
            None => self.err("unexpected end"),
        }
    }

    fn table(&mut self) -> Res<Lua> {
        self.expect(b'{')?;
        let mut array = Vec::new();
        let mut fields = BTreeMap::new();
        loop {
            if self.peek() == Some(b'}') {
                self.pos += 1;
                break;
            }
            let key = if self.peek() == Some(b'[') {
                self.pos += 1;
                let k = self.string()?;
                self.expect(b']')?;
                self.expect(b'=')?;
                Some(k)
            } else {
                let save = self.pos;
                match self.ident() {
                    Some(k) if self.peek() == Some(b'=') => {
                        self.pos += 1;
                        Some(k)
                    }
                    _ => {
                        self.pos = save;
                        None
                    }
                }
            };
            let v = self.value()?;
            match key {
                Some(k) => {
                    if fields.insert(k.clone(), v).is_some() {
                        return self.err(&format!("duplicate key {k:?}"));
                    }
                }
                None => array.push(v),
            }
            match self.peek() {
                Some(b',' | b';') => self.pos += 1,
                Some(b'}') => {}
                _ => return self.err("expected ',' or '}'"),
            }
        }
        Ok(Lua::Table { array, fields })
    }
}

/// Parses a chunk of the form `return <table>`.
pub fn parse_chunk(text: &str) -> Result<Lua, String> {
    let mut r = Reader { src: text.as_bytes(), pos: 0 };
    if r.ident().as_deref() != Some("return") {
        return r.err("expected return");
    }
    let v = r.value()?;
    if r.peek().is_some() {
        return r.err("trailing input");
    }
    Ok(v)
}
