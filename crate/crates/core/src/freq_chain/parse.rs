use std::collections::HashMap;

use super::{
    ChainError, ChainNode, Freq, FreqChain, LockCheck, NodeKind, ParseError, ParseErrorKind,
};

/// Whitespace-separated token with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(byte),
            (true, Some(s)) => {
                let text = &line[s..byte];
                out.push(Token {
                    text,
                    column: col + 1 - text.chars().count(),
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let text = &line[s..];
        let total = line.chars().count();
        out.push(Token {
            text,
            column: total + 1 - text.chars().count(),
        });
    }
    out
}

const UNITS: [(&str, u32); 6] = [
    ("THz", 15),
    ("GHz", 12),
    ("MHz", 9),
    ("kHz", 6),
    ("mHz", 0),
    ("Hz", 3),
];

/// Parses `[+|-]digits[.digits][unit]` into signed millihertz exactly.
/// A bare number is read as Hz.
pub(crate) fn parse_signed_millihertz(text: &str) -> Option<i64> {
    let (sign, body) = match text.as_bytes().first()? {
        b'+' => (1i128, &text[1..]),
        b'-' => (-1i128, &text[1..]),
        _ => (1i128, text),
    };
    let (number, exp) = UNITS
        .iter()
        .find_map(|&(unit, exp)| body.strip_suffix(unit).map(|n| (n, exp)))
        .unwrap_or((body, 3));
    let (int_part, frac_part) = match number.split_once('.') {
        Some((i, f)) => (i, f),
        None => (number, ""),
    };
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int_part.is_empty() && frac_part.is_empty()
        || !digits_ok(int_part)
        || !digits_ok(frac_part)
        || number.ends_with('.')
    {
        return None;
    }
    let exp = exp as usize;
    // Fractional digits beyond the millihertz resolution must be zero.
    let (kept, dropped) = if frac_part.len() > exp {
        frac_part.split_at(exp)
    } else {
        (frac_part, "")
    };
    if dropped.bytes().any(|b| b != b'0') {
        return None;
    }
    let mut value: i128 = 0;
    for b in int_part.bytes().chain(kept.bytes()) {
        value = value.checked_mul(10)?.checked_add((b - b'0') as i128)?;
    }
    for _ in kept.len()..exp {
        value = value.checked_mul(10)?;
    }
    i64::try_from(sign * value).ok()
}

fn freq_arg(tok: Token<'_>, line: usize) -> Result<Freq, ParseError> {
    match parse_signed_millihertz(tok.text) {
        Some(v) if v >= 0 && !tok.text.starts_with('-') => Ok(Freq(v as u64)),
        _ => Err(ParseError {
            line,
            column: tok.column,
            kind: ParseErrorKind::MalformedFrequency(tok.text.to_string()),
        }),
    }
}

fn keyed<'a>(tok: Token<'a>, key: &str, line: usize) -> Result<Token<'a>, ParseError> {
    let prefix_len = key.len() + 1;
    match tok.text.strip_prefix(key).and_then(|r| r.strip_prefix('=')) {
        Some(rest) => Ok(Token {
            text: rest,
            column: tok.column + prefix_len,
        }),
        None => Err(ParseError {
            line,
            column: tok.column,
            kind: ParseErrorKind::BadArgument {
                token: tok.text.to_string(),
                reason: format!("expected `{key}=...`"),
            },
        }),
    }
}

struct Parser {
    nodes: Vec<ChainNode>,
    checks: Vec<LockCheck>,
    defined: HashMap<String, usize>,
}

impl Parser {
    fn reference(&self, tok: Token<'_>, line: usize) -> Result<String, ParseError> {
        if self.defined.contains_key(tok.text) {
            Ok(tok.text.to_string())
        } else {
            Err(ParseError {
                line,
                column: tok.column,
                kind: ParseErrorKind::UndefinedRef(tok.text.to_string()),
            })
        }
    }

    fn line(&mut self, tokens: &[Token<'_>], line: usize) -> Result<(), ParseError> {
        let keyword = tokens[0];
        let args = &tokens[1..];
        let arity = |expected: usize| -> Result<(), ParseError> {
            if args.len() == expected {
                Ok(())
            } else {
                Err(ParseError {
                    line,
                    column: keyword.column,
                    kind: ParseErrorKind::WrongArity {
                        keyword: keyword.text.to_string(),
                        expected,
                        found: args.len(),
                    },
                })
            }
        };

        if keyword.text == "check" {
            arity(3)?;
            let id = self.reference(args[0], line)?;
            let expected = freq_arg(args[1], line)?;
            let tolerance = freq_arg(keyed(args[2], "tol", line)?, line)?;
            self.checks.push(LockCheck {
                id,
                expected,
                tolerance,
            });
            return Ok(());
        }

        let kind = match keyword.text {
            "source" => {
                arity(2)?;
                NodeKind::Source {
                    freq: freq_arg(args[1], line)?,
                }
            }
            "vco" => {
                arity(2)?;
                NodeKind::Vco {
                    freq: freq_arg(args[1], line)?,
                }
            }
            "double" => {
                arity(2)?;
                NodeKind::Double {
                    input: self.reference(args[1], line)?,
                }
            }
            "shift" => {
                arity(3)?;
                let delta = parse_signed_millihertz(args[2].text).ok_or_else(|| ParseError {
                    line,
                    column: args[2].column,
                    kind: ParseErrorKind::MalformedFrequency(args[2].text.to_string()),
                })?;
                NodeKind::Shift {
                    input: self.reference(args[1], line)?,
                    delta,
                }
            }
            "sideband" => {
                arity(4)?;
                let orders_tok = keyed(args[3], "orders", line)?;
                let orders = orders_tok
                    .text
                    .split(',')
                    .map(|k| k.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ParseError {
                        line,
                        column: orders_tok.column,
                        kind: ParseErrorKind::BadArgument {
                            token: orders_tok.text.to_string(),
                            reason: format!("orders must be comma-separated integers ({e})"),
                        },
                    })?;
                NodeKind::Sideband {
                    input: self.reference(args[1], line)?,
                    offset: freq_arg(args[2], line)?,
                    orders,
                }
            }
            "beat" | "mix" => {
                arity(3)?;
                let a = self.reference(args[1], line)?;
                let b = self.reference(args[2], line)?;
                if keyword.text == "beat" {
                    NodeKind::Beat { a, b }
                } else {
                    NodeKind::Mix { a, b }
                }
            }
            "lowpass" => {
                arity(3)?;
                NodeKind::LowPass {
                    input: self.reference(args[1], line)?,
                    cutoff: freq_arg(args[2], line)?,
                }
            }
            "divide" => {
                arity(3)?;
                let n = args[2]
                    .text
                    .parse::<u64>()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| ParseError {
                        line,
                        column: args[2].column,
                        kind: ParseErrorKind::BadArgument {
                            token: args[2].text.to_string(),
                            reason: "divide ratio must be a positive integer".into(),
                        },
                    })?;
                NodeKind::Divide {
                    input: self.reference(args[1], line)?,
                    n,
                }
            }
            other => {
                return Err(ParseError {
                    line,
                    column: keyword.column,
                    kind: ParseErrorKind::UnknownKind(other.to_string()),
                })
            }
        };

        let id = args[0];
        if let Some(&first_line) = self.defined.get(id.text) {
            return Err(ParseError {
                line,
                column: id.column,
                kind: ParseErrorKind::DuplicateId {
                    id: id.text.to_string(),
                    first_line,
                },
            });
        }
        if let NodeKind::LowPass { cutoff, .. } = &kind {
            if cutoff.0 == 0 {
                return Err(ParseError {
                    line,
                    column: args[2].column,
                    kind: ParseErrorKind::BadArgument {
                        token: args[2].text.to_string(),
                        reason: "cutoff must be > 0".into(),
                    },
                });
            }
        }
        self.defined.insert(id.text.to_string(), line);
        self.nodes.push(ChainNode {
            id: id.text.to_string(),
            kind,
        });
        Ok(())
    }
}

/// Parses a chain document. Errors carry 1-based line and column numbers.
pub fn parse_chain(text: &str) -> Result<FreqChain, ChainError> {
    let mut parser = Parser {
        nodes: Vec::new(),
        checks: Vec::new(),
        defined: HashMap::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        parser.line(&tokens, idx + 1)?;
    }
    FreqChain::new(parser.nodes, parser.checks)
}
