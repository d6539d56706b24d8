//! Text syntax for types.
//!
//! ```text
//! type     := "{" entry ("," entry)* "}"
//! entry    := selector ":" value
//! selector := "default" | "mod" INT "=" INT ("," INT)* | "primes" "{" INT+ "}"
//! value    := NAT | "inf"
//! ```
//!
//! Entries are applied left to right, later ones overriding earlier ones, and
//! exactly one `default` entry is required. `mod m = i, j` selects cells `i`
//! and `j` of the session indexing, so `m` must equal the session modulus.

use std::fmt;

use thiserror::Error;

use crate::prime_set::{PrimeIndexing, SymbolicPrimeSet};
use crate::primes;
use crate::types::{ExtendedNat, TypeRep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Comma,
    Colon,
    Equals,
    Int(u64),
    Word(String),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Open => f.write_str("'{'"),
            Token::Close => f.write_str("'}'"),
            Token::Comma => f.write_str("','"),
            Token::Colon => f.write_str("':'"),
            Token::Equals => f.write_str("'='"),
            Token::Int(n) => write!(f, "{n}"),
            Token::Word(w) => write!(f, "'{w}'"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let single = match c {
            '{' => Some(Token::Open),
            '}' => Some(Token::Close),
            ',' => Some(Token::Comma),
            ':' => Some(Token::Colon),
            '=' => Some(Token::Equals),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push((pos, tok));
        } else if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let value = text[pos..end].parse().map_err(|_| ParseError {
                position: pos,
                message: format!("integer {} is too large", &text[pos..end]),
            })?;
            out.push((pos, Token::Int(value)));
        } else if c.is_ascii_alphabetic() {
            let mut end = pos;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_alphanumeric() && d != '_' {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            out.push((pos, Token::Word(text[pos..end].to_string())));
        } else {
            return Err(ParseError {
                position: pos,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

enum Selector {
    Default,
    Set(SymbolicPrimeSet),
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
    end: usize,
    indexing: PrimeIndexing,
}

impl Parser {
    fn position(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.position(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.at + offset).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.at).map(|(_, t)| t.clone());
        if tok.is_some() {
            self.at += 1;
        }
        tok
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.at += 1;
                Ok(())
            }
            Some(t) => {
                let msg = format!("expected {want}, found {t}");
                self.error(msg)
            }
            None => self.error(format!("expected {want}, found end of input")),
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Token::Int(n)) => {
                let n = *n;
                self.at += 1;
                Ok(n)
            }
            Some(t) => {
                let msg = format!("expected an integer, found {t}");
                self.error(msg)
            }
            None => self.error("expected an integer, found end of input"),
        }
    }

    fn parse(mut self) -> Result<TypeRep, ParseError> {
        self.expect(Token::Open)?;
        let mut entries = Vec::new();
        loop {
            let start = self.position();
            let selector = self.selector()?;
            self.expect(Token::Colon)?;
            let value = self.value()?;
            entries.push((start, selector, value));
            match self.next() {
                Some(Token::Comma) => continue,
                Some(Token::Close) => break,
                Some(t) => {
                    self.at -= 1;
                    return self.error(format!("expected ',' or '}}', found {t}"));
                }
                None => return self.error("expected ',' or '}', found end of input"),
            }
        }
        if let Some(t) = self.peek() {
            let msg = format!("unexpected {t} after closing brace");
            return self.error(msg);
        }

        let defaults: Vec<usize> = entries
            .iter()
            .filter(|(_, s, _)| matches!(s, Selector::Default))
            .map(|(pos, _, _)| *pos)
            .collect();
        match defaults.len() {
            1 => {}
            0 => {
                return Err(ParseError {
                    position: 0,
                    message: "missing 'default' entry".into(),
                })
            }
            _ => {
                return Err(ParseError {
                    position: defaults[1],
                    message: "more than one 'default' entry".into(),
                })
            }
        }

        let all = SymbolicPrimeSet::all(self.indexing);
        let mut ty = TypeRep::integers(self.indexing);
        for (_, selector, value) in entries {
            let set = match &selector {
                Selector::Default => &all,
                Selector::Set(s) => s,
            };
            ty = ty.with_value_on(set, value).expect("same indexing");
        }
        Ok(ty)
    }

    fn selector(&mut self) -> Result<Selector, ParseError> {
        let word = match self.peek() {
            Some(Token::Word(w)) => w.clone(),
            Some(t) => {
                let msg = format!("expected 'default', 'mod' or 'primes', found {t}");
                return self.error(msg);
            }
            None => return self.error("expected a selector, found end of input"),
        };
        match word.as_str() {
            "default" => {
                self.at += 1;
                Ok(Selector::Default)
            }
            "mod" => {
                self.at += 1;
                let modulus_pos = self.position();
                let modulus = self.int()?;
                if modulus != self.indexing.modulus() as u64 {
                    return Err(ParseError {
                        position: modulus_pos,
                        message: format!(
                            "'mod {modulus}' does not match the session modulus {}",
                            self.indexing.modulus()
                        ),
                    });
                }
                self.expect(Token::Equals)?;
                let mut cells = vec![self.cell(modulus)?];
                while self.peek() == Some(&Token::Comma)
                    && matches!(self.peek_at(1), Some(Token::Int(_)))
                {
                    self.at += 1;
                    cells.push(self.cell(modulus)?);
                }
                let set =
                    SymbolicPrimeSet::from_cells(self.indexing, cells).expect("cells checked");
                Ok(Selector::Set(set))
            }
            "primes" => {
                self.at += 1;
                self.expect(Token::Open)?;
                let mut listed = Vec::new();
                loop {
                    let pos = self.position();
                    let p = self.int()?;
                    if !primes::is_prime(p) {
                        return Err(ParseError {
                            position: pos,
                            message: format!("{p} is not a prime"),
                        });
                    }
                    listed.push(p);
                    if self.peek() == Some(&Token::Comma) {
                        self.at += 1;
                    }
                    if self.peek() == Some(&Token::Close) {
                        self.at += 1;
                        break;
                    }
                }
                let set = SymbolicPrimeSet::finite(self.indexing, listed).expect("primes checked");
                Ok(Selector::Set(set))
            }
            other => {
                let msg = format!("unknown selector '{other}'");
                self.error(msg)
            }
        }
    }

    fn cell(&mut self, modulus: u64) -> Result<usize, ParseError> {
        let pos = self.position();
        let i = self.int()?;
        if i >= modulus {
            return Err(ParseError {
                position: pos,
                message: format!("cell {i} out of range for mod {modulus}"),
            });
        }
        Ok(i as usize)
    }

    fn value(&mut self) -> Result<ExtendedNat, ParseError> {
        let pos = self.position();
        match self.next() {
            Some(Token::Int(n)) => u32::try_from(n)
                .map(ExtendedNat::Fin)
                .map_err(|_| ParseError {
                    position: pos,
                    message: format!("height {n} is too large"),
                }),
            Some(Token::Word(w)) if w == "inf" => Ok(ExtendedNat::Inf),
            Some(t) => {
                self.at -= 1;
                self.error(format!("expected a height or 'inf', found {t}"))
            }
            None => self.error("expected a height or 'inf', found end of input"),
        }
    }
}

/// Parses a type over the session indexing.
pub fn parse_type(text: &str, indexing: PrimeIndexing) -> Result<TypeRep, ParseError> {
    let tokens = tokenize(text)?;
    Parser {
        tokens,
        at: 0,
        end: text.len(),
        indexing,
    }
    .parse()
}

fn join_nums<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

/// Renders `ty` so that [`parse_type`] reproduces it exactly.
///
/// The piece owning the most cells becomes the default; every other piece
/// with cells gets a `mod` entry, and explicit primes are listed last.
pub fn render_type(ty: &TypeRep) -> String {
    let pieces = ty.pieces();
    let default = pieces
        .iter()
        .enumerate()
        .max_by_key(|(i, (set, _))| (set.cells().len(), std::cmp::Reverse(*i)))
        .map(|(i, _)| i)
        .expect("a type has at least one piece");
    let modulus = ty.indexing().modulus();
    let mut entries = vec![format!("default: {}", pieces[default].1)];
    for (i, (set, value)) in pieces.iter().enumerate() {
        if i != default && !set.cells().is_empty() {
            entries.push(format!(
                "mod {modulus} = {}: {value}",
                join_nums(set.cells(), ", ")
            ));
        }
    }
    for (set, value) in pieces {
        if !set.plus().is_empty() {
            entries.push(format!(
                "primes {{{}}}: {value}",
                join_nums(set.plus(), " ")
            ));
        }
    }
    format!("{{ {} }}", entries.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtendedNat::{Fin, Inf};

    fn ix() -> PrimeIndexing {
        PrimeIndexing::new(16).unwrap()
    }

    fn parse(text: &str) -> Result<TypeRep, ParseError> {
        parse_type(text, ix())
    }

    #[test]
    fn examples() {
        assert_eq!(parse("{ default: inf }").unwrap(), TypeRep::rationals(ix()));
        assert_eq!(parse("{default:0}").unwrap(), TypeRep::integers(ix()));
        assert_eq!(
            parse("{ default: inf, primes {5}: 0 }").unwrap(),
            TypeRep::localization(ix(), 5).unwrap()
        );
        let cells = SymbolicPrimeSet::from_cells(ix(), [1, 3]).unwrap();
        assert_eq!(
            parse("{ default: inf, mod 16 = 1, 3: 1 }").unwrap(),
            TypeRep::rationals(ix())
                .with_value_on(&cells, Fin(1))
                .unwrap()
        );
    }

    #[test]
    fn later_entries_override() {
        let t = parse("{ default: 2, primes {3 5}: inf, primes {5}: 1 }").unwrap();
        assert_eq!(t.value_at(3).unwrap(), Inf);
        assert_eq!(t.value_at(5).unwrap(), Fin(1));
        assert_eq!(t.value_at(7).unwrap(), Fin(2));
        // A trailing default overrides everything before it.
        let t = parse("{ primes {3}: 1, default: 0 }").unwrap();
        assert_eq!(t, TypeRep::integers(ix()));
    }

    #[test]
    fn primes_list_accepts_commas() {
        assert_eq!(
            parse("{ default: 0, primes {2, 3}: 1 }").unwrap(),
            parse("{ default: 0, primes {2 3}: 1 }").unwrap()
        );
    }

    #[test]
    fn modulus_mismatch_names_session_modulus() {
        let err = parse("{ default: 0, mod 8 = 1: 1 }").unwrap_err();
        assert!(err.message.contains("session modulus 16"), "{err}");
        assert_eq!(err.position, 18);
    }

    #[test]
    fn cell_out_of_range() {
        let err = parse("{ default: 0, mod 16 = 16: 1 }").unwrap_err();
        assert!(err.message.contains("out of range"), "{err}");
    }

    #[test]
    fn default_required_exactly_once() {
        assert!(parse("{ primes {2}: 1 }")
            .unwrap_err()
            .message
            .contains("missing"));
        assert!(parse("{ default: 1, default: 2 }")
            .unwrap_err()
            .message
            .contains("more than one"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("{ default 0 }").unwrap_err();
        assert_eq!(err.position, 10);
        let err = parse("{ default: 0").unwrap_err();
        assert_eq!(err.position, 12);
        let err = parse("{ default: zero }").unwrap_err();
        assert_eq!(err.position, 11);
        let err = parse("{ default: 0 } x").unwrap_err();
        assert_eq!(err.position, 15);
        assert!(parse("{ default: 0, primes {4}: 1 }").is_err());
        assert!(parse("{ default: 0, cells: 1 }").is_err());
        assert!(parse("{ default: 0 # }").is_err());
    }

    #[test]
    fn render_round_trips() {
        for text in [
            "{ default: inf }",
            "{ default: inf, primes {5}: 0 }",
            "{ default: 3, mod 16 = 0, 5: inf, primes {2 7 11}: 1, mod 16 = 9: 0 }",
            "{ default: 0, mod 16 = 0, 1, 2, 3, 4, 5, 6, 7, 8: 2 }",
        ] {
            let t = parse(text).unwrap();
            let rendered = render_type(&t);
            assert_eq!(parse(&rendered).unwrap(), t, "{text} -> {rendered}");
        }
    }

    #[test]
    fn render_shapes() {
        assert_eq!(render_type(&TypeRep::rationals(ix())), "{ default: inf }");
        assert_eq!(
            render_type(&TypeRep::localization(ix(), 5).unwrap()),
            "{ default: inf, primes {5}: 0 }"
        );
    }
}
