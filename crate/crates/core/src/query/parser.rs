//! Parser for the supported SQL subset:
//!
//! ```text
//! SELECT count(*) FROM <table> WHERE <cond> [AND <cond>]...
//! cond := attr (= | <> | <= | < | >= | >) literal
//!       | attr [NOT] IN (literal [, literal]...)
//! ```
//!
//! Literals are typed by lexical form: quoted strings are text (kept
//! verbatim), unquoted tokens must be numeric. Anything outside the subset
//! (OR, subqueries, GROUP BY, functions) is a parse error with a position.

use crate::query::ast::{Comparator, Condition, Query};
use crate::query::QueryError;
use crate::tabular::Value;

pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let tokens = tokenize(text)?;
    Parser { tokens, at: 0 }.query()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),    // identifier or keyword, original case
    Symbol(&'static str),
    Number(String),
    Quoted(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    pos: usize, // byte offset
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, QueryError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let pos = i;
        match c {
            '(' => {
                out.push(Spanned { tok: Tok::Symbol("("), pos });
                i += 1;
            }
            ')' => {
                out.push(Spanned { tok: Tok::Symbol(")"), pos });
                i += 1;
            }
            ',' => {
                out.push(Spanned { tok: Tok::Symbol(","), pos });
                i += 1;
            }
            '*' => {
                out.push(Spanned { tok: Tok::Symbol("*"), pos });
                i += 1;
            }
            '=' => {
                out.push(Spanned { tok: Tok::Symbol("="), pos });
                i += 1;
            }
            '<' => {
                let sym = match bytes.get(i + 1) {
                    Some(b'>') => "<>",
                    Some(b'=') => "<=",
                    _ => "<",
                };
                i += sym.len();
                out.push(Spanned { tok: Tok::Symbol(sym), pos });
            }
            '>' => {
                let sym = if bytes.get(i + 1) == Some(&b'=') { ">=" } else { ">" };
                i += sym.len();
                out.push(Spanned { tok: Tok::Symbol(sym), pos });
            }
            '!' if bytes.get(i + 1) == Some(&b'=') => {
                return Err(QueryError::Parse {
                    pos,
                    detail: "unknown comparator \"!=\" (use <>)".into(),
                })
            }
            '\'' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match bytes.get(i) {
                        Some(b'\'') if bytes.get(i + 1) == Some(&b'\'') => {
                            s.push('\'');
                            i += 2;
                        }
                        Some(b'\'') => {
                            i += 1;
                            break;
                        }
                        Some(&b) => {
                            // multi-byte chars pass through unchanged
                            let ch = text[i..].chars().next().unwrap();
                            s.push(ch);
                            i += ch.len_utf8();
                            let _ = b;
                        }
                        None => {
                            return Err(QueryError::Parse {
                                pos,
                                detail: "unterminated string literal".into(),
                            })
                        }
                    }
                }
                out.push(Spanned { tok: Tok::Quoted(s), pos });
            }
            _ if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let b = bytes[i] as char;
                    if b.is_ascii_alphanumeric() || b == '.' || b == '+' || b == '-' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Number(text[start..i].to_string()),
                    pos,
                });
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                i += 1;
                while i < bytes.len() {
                    let b = bytes[i] as char;
                    if b.is_ascii_alphanumeric() || b == '_' || b == '-' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Word(text[start..i].to_string()),
                    pos,
                });
            }
            other => {
                return Err(QueryError::Parse {
                    pos,
                    detail: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn query(mut self) -> Result<Query, QueryError> {
        self.keyword("SELECT")?;
        self.keyword("COUNT")?;
        self.symbol("(")?;
        self.symbol("*")?;
        self.symbol(")")?;
        self.keyword("FROM")?;
        self.identifier()?; // table name, semantically ignored
        self.keyword("WHERE")?;

        let mut conditions = vec![self.condition()?];
        while !self.done() {
            let (word, pos) = self.peek_word();
            match word.as_deref() {
                Some("AND") => {
                    self.at += 1;
                    conditions.push(self.condition()?);
                }
                Some(other @ ("OR" | "GROUP" | "ORDER" | "HAVING" | "LIMIT" | "UNION")) => {
                    return Err(QueryError::Parse {
                        pos,
                        detail: format!("unsupported syntax {other:?} (only AND conjunctions)"),
                    })
                }
                _ => {
                    return Err(QueryError::Parse {
                        pos,
                        detail: "expected AND or end of query".into(),
                    })
                }
            }
        }
        Query::new(conditions)
    }

    fn condition(&mut self) -> Result<Condition, QueryError> {
        let attr = self.identifier()?;
        let (word, pos) = self.peek_word();
        match word.as_deref() {
            Some("IN") => {
                self.at += 1;
                let values = self.literal_list()?;
                return Condition::new(attr, Comparator::In, values);
            }
            Some("NOT") => {
                self.at += 1;
                self.keyword("IN")?;
                let values = self.literal_list()?;
                return Condition::new(attr, Comparator::NotIn, values);
            }
            _ => {}
        }
        let op = match self.next() {
            Some(Spanned { tok: Tok::Symbol(sym), .. }) => match sym {
                "=" => Comparator::Eq,
                "<>" => Comparator::Neq,
                "<=" => Comparator::Le,
                "<" => Comparator::Lt,
                ">=" => Comparator::Ge,
                ">" => Comparator::Gt,
                other => {
                    return Err(QueryError::Parse {
                        pos,
                        detail: format!("unknown comparator {other:?}"),
                    })
                }
            },
            _ => {
                return Err(QueryError::Parse {
                    pos,
                    detail: "expected a comparator".into(),
                })
            }
        };
        let value = self.literal()?;
        Condition::scalar(attr, op, value)
    }

    fn literal_list(&mut self) -> Result<Vec<Value>, QueryError> {
        self.symbol("(")?;
        let mut values = vec![self.literal()?];
        loop {
            match self.next() {
                Some(Spanned { tok: Tok::Symbol(","), .. }) => values.push(self.literal()?),
                Some(Spanned { tok: Tok::Symbol(")"), .. }) => return Ok(values),
                other => {
                    return Err(QueryError::Parse {
                        pos: other.map(|s| s.pos).unwrap_or(usize::MAX),
                        detail: "expected , or ) in value list".into(),
                    })
                }
            }
        }
    }

    fn literal(&mut self) -> Result<Value, QueryError> {
        match self.next() {
            Some(Spanned { tok: Tok::Quoted(s), .. }) => Ok(Value::Text(s)),
            Some(Spanned { tok: Tok::Number(n), pos }) => {
                let v = Value::classify(&n);
                if v.is_numeric() {
                    Ok(v)
                } else {
                    Err(QueryError::Parse {
                        pos,
                        detail: format!("malformed number {n:?}"),
                    })
                }
            }
            Some(Spanned { tok, pos }) => Err(QueryError::Parse {
                pos,
                detail: format!("expected a literal, found {tok:?}"),
            }),
            None => Err(QueryError::Parse {
                pos: usize::MAX,
                detail: "expected a literal, found end of input".into(),
            }),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        match self.next() {
            Some(Spanned { tok: Tok::Word(w), .. }) if w.eq_ignore_ascii_case(kw) => Ok(()),
            Some(Spanned { tok, pos }) => Err(QueryError::Parse {
                pos,
                detail: format!("expected {kw}, found {tok:?}"),
            }),
            None => Err(QueryError::Parse {
                pos: usize::MAX,
                detail: format!("expected {kw}, found end of input"),
            }),
        }
    }

    fn symbol(&mut self, sym: &str) -> Result<(), QueryError> {
        match self.next() {
            Some(Spanned { tok: Tok::Symbol(s), .. }) if s == sym => Ok(()),
            Some(Spanned { tok, pos }) => Err(QueryError::Parse {
                pos,
                detail: format!("expected {sym:?}, found {tok:?}"),
            }),
            None => Err(QueryError::Parse {
                pos: usize::MAX,
                detail: format!("expected {sym:?}, found end of input"),
            }),
        }
    }

    fn identifier(&mut self) -> Result<String, QueryError> {
        match self.next() {
            Some(Spanned { tok: Tok::Word(w), pos }) => {
                if is_reserved(&w) {
                    Err(QueryError::Parse {
                        pos,
                        detail: format!("unsupported syntax {:?}", w.to_ascii_uppercase()),
                    })
                } else {
                    Ok(w)
                }
            }
            Some(Spanned { tok, pos }) => Err(QueryError::Parse {
                pos,
                detail: format!("expected an identifier, found {tok:?}"),
            }),
            None => Err(QueryError::Parse {
                pos: usize::MAX,
                detail: "expected an identifier, found end of input".into(),
            }),
        }
    }

    fn peek_word(&self) -> (Option<String>, usize) {
        match self.tokens.get(self.at) {
            Some(Spanned { tok: Tok::Word(w), pos }) => {
                (Some(w.to_ascii_uppercase()), *pos)
            }
            Some(Spanned { pos, .. }) => (None, *pos),
            None => (None, usize::MAX),
        }
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn done(&self) -> bool {
        self.at >= self.tokens.len()
    }
}

fn is_reserved(word: &str) -> bool {
    [
        "SELECT", "COUNT", "FROM", "WHERE", "AND", "OR", "NOT", "IN", "GROUP", "ORDER", "HAVING",
        "LIMIT", "UNION", "JOIN",
    ]
    .iter()
    .any(|kw| word.eq_ignore_ascii_case(kw))
}
