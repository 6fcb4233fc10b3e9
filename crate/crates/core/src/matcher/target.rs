//! XPath-like target strings:
//! `/(agent|artifact|process)[name="N"]?([ITEM (=|!=|<|<=|>|>=|~) VALUE])*`, repeated.
//! Each further step is a vertex reached by one outgoing edge of any label.

use std::fmt;

use super::partition::{AttrConstraint, PatternEdge, PatternVertex, ProvenancePartition};
use super::predicate::Predicate;
use super::MatchError;
use crate::provenance::{AttrValue, VertexType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetPath {
    source: String,
    partition: ProvenancePartition,
}

impl TargetPath {
    pub fn parse(text: &str) -> Result<Self, MatchError> {
        let vertices = Parser { src: text, pos: 0 }.parse()?;
        let edges = (1..vertices.len())
            .map(|i| PatternEdge {
                from: i - 1,
                to: i,
                label: None,
            })
            .collect();
        Ok(TargetPath {
            source: text.trim().to_string(),
            partition: ProvenancePartition::new(vertices, edges)?,
        })
    }

    pub fn partition(&self) -> &ProvenancePartition {
        &self.partition
    }

    pub fn as_str(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for TargetPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> MatchError {
        MatchError::BadTarget {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.'))
            .unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..self.pos]
    }

    fn parse(mut self) -> Result<Vec<PatternVertex>, MatchError> {
        let mut steps = Vec::new();
        self.skip_ws();
        while !self.rest().trim_end().trim_end_matches('/').is_empty() {
            if !self.eat("/") {
                return Err(self.err("expected `/`"));
            }
            steps.push(self.step()?);
            self.skip_ws();
        }
        if steps.is_empty() {
            return Err(self.err("empty target"));
        }
        Ok(steps)
    }

    fn step(&mut self) -> Result<PatternVertex, MatchError> {
        let at = self.pos;
        let vtype = match self.word() {
            "agent" => VertexType::Agent,
            "artifact" => VertexType::Artifact,
            "process" => VertexType::Process,
            other => {
                let other = other.to_string();
                self.pos = at;
                return Err(self.err(format!("expected agent, artifact or process, found `{other}`")));
            }
        };
        let mut v = PatternVertex::new(vtype, None);
        while self.eat("[") {
            let item = self.word().to_string();
            if item.is_empty() {
                return Err(self.err("expected attribute item"));
            }
            let op = self.op()?;
            let value = self.value()?;
            if !self.eat("]") {
                return Err(self.err("expected `]`"));
            }
            match (item.as_str(), op, &value) {
                ("name", Predicate::Eq, AttrValue::Str(n)) if v.name.is_none() => v.name = Some(n.clone()),
                _ => v.constraints.push(AttrConstraint::new(item, op, value)),
            }
        }
        Ok(v)
    }

    fn op(&mut self) -> Result<Predicate, MatchError> {
        // Longest symbols first.
        for sym in ["!=", "<=", ">=", "=", "<", ">", "~"] {
            if self.eat(sym) {
                return Ok(Predicate::parse(sym).expect("known symbol"));
            }
        }
        Err(self.err("expected predicate"))
    }

    fn value(&mut self) -> Result<AttrValue, MatchError> {
        self.skip_ws();
        if self.eat("\"") {
            let mut out = String::new();
            let mut chars = self.rest().char_indices();
            while let Some((i, c)) = chars.next() {
                match c {
                    '"' => {
                        self.pos += i + 1;
                        return Ok(AttrValue::Str(out));
                    }
                    '\\' => match chars.next() {
                        Some((_, e)) => out.push(e),
                        None => break,
                    },
                    c => out.push(c),
                }
            }
            self.pos = self.src.len();
            return Err(self.err("unterminated string"));
        }
        let start = self.pos;
        let len = self.rest().find([']']).unwrap_or(self.rest().len());
        let raw = self.src[start..start + len].trim();
        if raw.is_empty() {
            return Err(self.err("expected value"));
        }
        self.pos = start + len;
        if let Ok(i) = raw.parse::<i64>() {
            return Ok(AttrValue::Int(i));
        }
        if let Some(t) = AttrValue::timestamp(raw) {
            return Ok(t);
        }
        Ok(AttrValue::Str(raw.to_string()))
    }
}
