//! Text specs for functions.
//!
//! ```text
//! spec   := "csv:" path ["#" column] | chain
//! chain  := term ["@" chain]
//! term   := name [":" key "=" number {"," key "=" number}]
//! ```
//!
//! `f@g` composes catalog functions. `power`, `scale` and `restrict` wrap the
//! function to their right. `valiron` takes a rho spec (`const`, `loglog`,
//! `sinlog`), after which the chain may continue. Plane functions use the
//! same terms (`logabs`, `abs2`, `re`, `shift`, `rotate`) plus `max(u;v;...)`.
//! Every parse error carries the byte offset where it was detected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::{Family, RhoFamily};
use crate::sample::{LogLogSample, Track};
use crate::source::Source;
use crate::subharmonic::PlaneFunction;

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Family(Family),
    Csv {
        path: PathBuf,
        column: Option<String>,
    },
}

impl FunctionSpec {
    pub fn parse(text: &str) -> Result<FunctionSpec> {
        if let Some(rest) = text.strip_prefix("csv:") {
            let (path, column) = match rest.split_once('#') {
                Some((p, c)) => (p, Some(c)),
                None => (rest, None),
            };
            if path.is_empty() {
                return Err(parse_err(4, "empty csv path"));
            }
            if column.is_some_and(str::is_empty) {
                return Err(parse_err(5 + path.len(), "empty column name"));
            }
            return Ok(FunctionSpec::Csv {
                path: PathBuf::from(path),
                column: column.map(str::to_owned),
            });
        }
        let mut p = Parser::new(text);
        let f = p.chain()?;
        p.end()?;
        Ok(FunctionSpec::Family(f))
    }

    /// Loads a sample from disk if needed.
    pub fn to_source(&self) -> Result<Source> {
        match self {
            FunctionSpec::Family(f) => Ok(Source::from(f.clone())),
            FunctionSpec::Csv { path, column } => Ok(Source::Sample(LogLogSample::from_csv_path(
                path,
                column.as_deref(),
            )?)),
        }
    }

    /// Reads a raw track; only `csv:` specs qualify.
    pub fn to_track(&self) -> Result<Track> {
        match self {
            FunctionSpec::Csv { path, column } => Track::from_csv_path(path, column.as_deref()),
            FunctionSpec::Family(f) => Err(Error::Capability(format!(
                "{f} is a catalog family, a csv track is required"
            ))),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionSpec::parse(s)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Family(g) => g.fmt(f),
            FunctionSpec::Csv { path, column } => {
                write!(f, "csv:{}", path.display())?;
                if let Some(c) = column {
                    write!(f, "#{c}")?;
                }
                Ok(())
            }
        }
    }
}

pub fn parse_family(text: &str) -> Result<Family> {
    let mut p = Parser::new(text);
    let f = p.chain()?;
    p.end()?;
    Ok(f)
}

pub fn parse_rho(text: &str) -> Result<RhoFamily> {
    let mut p = Parser::new(text);
    let r = p.rho()?;
    p.end()?;
    Ok(r)
}

pub fn parse_plane(text: &str) -> Result<PlaneFunction> {
    let mut p = Parser::new(text);
    let u = p.plane()?;
    p.end()?;
    Ok(u)
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

struct Term {
    name: String,
    pos: usize,
    params: Vec<(String, f64, usize)>,
}

impl Term {
    /// Takes exactly the listed keys, in any order; `defaults` fill the gaps.
    fn take(&self, keys: &[(&str, Option<f64>)]) -> Result<Vec<f64>> {
        for (k, _, pos) in &self.params {
            if !keys.iter().any(|(name, _)| name == k) {
                let known: Vec<&str> = keys.iter().map(|(n, _)| *n).collect();
                return Err(parse_err(
                    *pos,
                    format!(
                        "unknown parameter `{k}` for `{}` (expected {})",
                        self.name,
                        list(&known)
                    ),
                ));
            }
        }
        keys.iter()
            .map(|(name, default)| {
                let found: Vec<_> = self.params.iter().filter(|(k, ..)| k == name).collect();
                match (found.as_slice(), default) {
                    ([(_, v, _)], _) => Ok(*v),
                    ([], Some(d)) => Ok(*d),
                    ([], None) => Err(parse_err(
                        self.pos,
                        format!("`{}` needs parameter `{name}`", self.name),
                    )),
                    ([.., (_, _, pos)], _) => {
                        Err(parse_err(*pos, format!("parameter `{name}` given twice")))
                    }
                }
            })
            .collect()
    }
}

fn list(names: &[&str]) -> String {
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

const FAMILY_NAMES: &[&str] = &[
    "pow",
    "powlog",
    "powloglog",
    "osc",
    "oscslow",
    "expo",
    "sqrtlog",
    "id",
    "log",
    "recip",
    "gausslog",
    "linosc",
    "invlog1p",
    "boundedosc",
    "valiron",
    "power",
    "scale",
    "restrict",
];

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(parse_err(self.pos, format!("unexpected `{c}`"))),
        }
    }

    fn ident(&mut self) -> Result<(String, usize)> {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(match self.peek() {
                None => parse_err(start, "expected a name, found end of input"),
                Some(c) => parse_err(start, format!("expected a name, found `{c}`")),
            });
        }
        self.pos += len;
        Ok((self.text[start..self.pos].to_owned(), start))
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let len = self
            .rest()
            .find([',', '@', ';', ')', '('])
            .unwrap_or(self.rest().len());
        let raw = &self.text[start..start + len];
        let v: f64 = raw
            .parse()
            .map_err(|_| parse_err(start, format!("`{raw}` is not a number")))?;
        if v.is_nan() {
            return Err(parse_err(start, "NaN is not a valid parameter"));
        }
        self.pos += len;
        Ok(v)
    }

    fn term(&mut self) -> Result<Term> {
        let (name, pos) = self.ident()?;
        let mut params = Vec::new();
        if self.eat(':') {
            loop {
                let (key, kpos) = self.ident()?;
                if !self.eat('=') {
                    return Err(parse_err(self.pos, format!("expected `=` after `{key}`")));
                }
                params.push((key, self.number()?, kpos));
                if !self.eat(',') {
                    break;
                }
            }
        }
        Ok(Term { name, pos, params })
    }

    fn expect_at(&mut self, owner: &Term) -> Result<()> {
        if self.eat('@') {
            Ok(())
        } else {
            Err(parse_err(
                self.pos,
                format!("`{}` needs `@` and an argument", owner.name),
            ))
        }
    }

    fn chain(&mut self) -> Result<Family> {
        let t = self.term()?;
        let leaf = match t.name.as_str() {
            "power" | "scale" | "restrict" => {
                let key = match t.name.as_str() {
                    "power" => "a",
                    "scale" => "c",
                    _ => "x_min",
                };
                let v = t.take(&[(key, None)])?[0];
                self.expect_at(&t)?;
                let inner = self.chain()?;
                return Ok(match t.name.as_str() {
                    "power" => inner.powered(v),
                    "scale" => inner.scaled(v),
                    _ => inner.restricted(v),
                });
            }
            "valiron" => {
                t.take(&[])?;
                self.expect_at(&t)?;
                Family::Valiron(self.rho()?)
            }
            _ => family_leaf(&t)?,
        };
        if self.eat('@') {
            Ok(leaf.compose(self.chain()?))
        } else {
            Ok(leaf)
        }
    }

    fn rho(&mut self) -> Result<RhoFamily> {
        let t = self.term()?;
        Ok(match t.name.as_str() {
            "const" => RhoFamily::Const {
                c: t.take(&[("c", None)])?[0],
            },
            "loglog" => {
                let v = t.take(&[("rho", None), ("b", None)])?;
                RhoFamily::LogLog { rho: v[0], b: v[1] }
            }
            "sinlog" => {
                let v = t.take(&[("rho", None), ("a", None)])?;
                RhoFamily::SinLog { rho: v[0], a: v[1] }
            }
            other => {
                return Err(parse_err(
                    t.pos,
                    format!("unknown rho family `{other}` (expected const, loglog, sinlog)"),
                ))
            }
        })
    }

    fn plane(&mut self) -> Result<PlaneFunction> {
        let start = self.pos;
        let (name, pos) = self.ident()?;
        if name == "max" {
            if !self.eat('(') {
                return Err(parse_err(self.pos, "expected `(` after `max`"));
            }
            let mut parts = vec![self.plane()?];
            while self.eat(';') {
                parts.push(self.plane()?);
            }
            if !self.eat(')') {
                return Err(parse_err(self.pos, "expected `;` or `)`"));
            }
            return Ok(PlaneFunction::max_of(parts));
        }
        self.pos = start;
        let t = self.term()?;
        Ok(match t.name.as_str() {
            "logabs" => {
                let v = t.take(&[("a", Some(0.0)), ("b", Some(0.0))])?;
                PlaneFunction::LogAbs { re: v[0], im: v[1] }
            }
            "abs2" => {
                t.take(&[])?;
                PlaneFunction::AbsSq
            }
            "re" => {
                t.take(&[])?;
                PlaneFunction::Re
            }
            "shift" | "rotate" => {
                let key = if t.name == "shift" { "c" } else { "theta" };
                let v = t.take(&[(key, None)])?[0];
                self.expect_at(&t)?;
                let inner = self.plane()?;
                if t.name == "shift" {
                    inner.shifted(v)
                } else {
                    inner.rotated(v)
                }
            }
            other => {
                return Err(parse_err(
                    pos,
                    format!("unknown plane function `{other}` (expected logabs, abs2, re, max, shift, rotate)"),
                ))
            }
        })
    }
}

fn family_leaf(t: &Term) -> Result<Family> {
    let two = |a: &str, b: &str| t.take(&[(a, None), (b, None)]);
    Ok(match t.name.as_str() {
        "pow" => Family::Pow {
            rho: t.take(&[("rho", None)])?[0],
        },
        "powlog" => {
            let v = two("rho", "b")?;
            Family::PowLog { rho: v[0], b: v[1] }
        }
        "powloglog" => {
            let v = two("rho", "b")?;
            Family::PowLogLog { rho: v[0], b: v[1] }
        }
        "osc" => {
            let v = two("rho", "a")?;
            Family::Osc { rho: v[0], a: v[1] }
        }
        "oscslow" => {
            let v = two("rho", "a")?;
            Family::OscSlow { rho: v[0], a: v[1] }
        }
        "expo" => Family::Expo {
            c: t.take(&[("c", None)])?[0],
        },
        "linosc" => {
            let v = two("c", "a")?;
            Family::LinOsc { c: v[0], a: v[1] }
        }
        "boundedosc" => {
            let v = two("c", "a")?;
            Family::BoundedOsc { c: v[0], a: v[1] }
        }
        "sqrtlog" | "id" | "log" | "recip" | "gausslog" | "invlog1p" => {
            t.take(&[])?;
            match t.name.as_str() {
                "sqrtlog" => Family::SqrtLog,
                "id" => Family::Id,
                "log" => Family::Log,
                "recip" => Family::Recip,
                "gausslog" => Family::GaussLog,
                _ => Family::InvLog1p,
            }
        }
        other => {
            return Err(parse_err(
                t.pos,
                format!(
                    "unknown family `{other}` (expected one of {})",
                    FAMILY_NAMES.join(", ")
                ),
            ))
        }
    })
}
