//! Recursive-descent parser for the specification grammar.

use super::{Cell, ClassSpec, GridMatrix, NamedClass, SymmetryOp};
use crate::perm::Perm;
use crate::{Error, Result};

pub(super) fn parse_spec(s: &str) -> Result<ClassSpec> {
    let mut p = Parser {
        s: s.as_bytes(),
        pos: 0,
    };
    p.ws();
    let spec = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(Error::parse(format!(
            "trailing input at byte {}: {:?}",
            p.pos,
            p.rest()
        )));
    }
    Ok(spec)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &str {
        std::str::from_utf8(&self.s[self.pos..]).unwrap_or("<non-utf8>")
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(format!(
                "expected {:?} at byte {}, found {:?}",
                c as char,
                self.pos,
                self.rest()
                    .chars()
                    .next()
                    .map(String::from)
                    .unwrap_or_default()
            )))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::parse(format!(
                "expected a name at byte {start}, found {:?}",
                self.rest()
                    .chars()
                    .next()
                    .map(String::from)
                    .unwrap_or_default()
            )));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .to_string())
    }

    fn uint(&mut self) -> Result<usize> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::parse(format!("expected an integer at byte {start}")));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse("integer out of range".to_string()))
    }

    fn expr(&mut self) -> Result<ClassSpec> {
        let id = self.ident()?;
        self.expr_from_ident(&id)
    }

    fn expr_from_ident(&mut self, id: &str) -> Result<ClassSpec> {
        match id {
            "Av" => {
                self.expect(b'(')?;
                let mut basis = vec![self.perm_arg()?];
                loop {
                    self.ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            basis.push(self.perm_arg()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(ClassSpec::Av(basis));
                        }
                        _ => {
                            return Err(Error::parse(format!(
                                "expected ',' or ')' in Av(..) at byte {}",
                                self.pos
                            )))
                        }
                    }
                }
            }
            "grid" => {
                self.expect(b'(')?;
                let mut rows = vec![self.row()?];
                loop {
                    self.ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                            rows.push(self.row()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(ClassSpec::Grid(GridMatrix::from_visual_rows(rows)?));
                        }
                        _ => {
                            return Err(Error::parse(format!(
                                "expected ',' or ')' in grid(..) at byte {}",
                                self.pos
                            )))
                        }
                    }
                }
            }
            "union" => {
                self.expect(b'(')?;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b')')?;
                Ok(ClassSpec::Union(Box::new(a), Box::new(b)))
            }
            "rev" | "comp" | "inv" | "flip" => {
                let op = match id {
                    "rev" => SymmetryOp::Rev,
                    "comp" => SymmetryOp::Comp,
                    "inv" => SymmetryOp::Inv,
                    _ => SymmetryOp::Flip,
                };
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(ClassSpec::Sym(op, Box::new(inner)))
            }
            "sumcl" | "skewcl" => {
                let sum = id == "sumcl";
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(if sum {
                    ClassSpec::SumClosure(Box::new(inner))
                } else {
                    ClassSpec::SkewClosure(Box::new(inner))
                })
            }
            "fringe" | "rfringe" => {
                self.expect(b'(')?;
                let k = self.uint()?;
                self.expect(b')')?;
                Ok(if id == "fringe" {
                    ClassSpec::Fringe(k)
                } else {
                    ClassSpec::RFringe(k)
                })
            }
            other => NamedClass::from_token(other)
                .map(ClassSpec::Named)
                .ok_or_else(|| Error::parse(format!("unknown class name {other:?}"))),
        }
    }

    /// A permutation literal inside Av(..): everything up to the next comma
    /// or closing parenthesis. Compact digits or space-separated values.
    fn perm_arg(&mut self) -> Result<Perm> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != b',' && self.s[self.pos] != b')' {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos])
            .map_err(|_| Error::parse("non-utf8 in permutation literal".to_string()))?
            .trim();
        if text.is_empty() {
            return Err(Error::parse(format!(
                "empty permutation literal at byte {start}"
            )));
        }
        text.parse()
    }

    fn row(&mut self) -> Result<Vec<Cell>> {
        self.expect(b'[')?;
        let mut cells = vec![self.cell()?];
        loop {
            self.ws();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    cells.push(self.cell()?);
                }
                Some(b']') => {
                    self.pos += 1;
                    return Ok(cells);
                }
                _ => {
                    return Err(Error::parse(format!(
                        "expected ',' or ']' in a grid row at byte {}",
                        self.pos
                    )))
                }
            }
        }
    }

    fn cell(&mut self) -> Result<Cell> {
        self.ws();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            return Ok(Cell::Empty);
        }
        let id = self.ident()?;
        if id == "pt" {
            return Ok(Cell::Point);
        }
        match self.expr_from_ident(&id)? {
            ClassSpec::Named(NamedClass::Inc) => Ok(Cell::Inc),
            ClassSpec::Named(NamedClass::Dec) => Ok(Cell::Dec),
            e => Ok(Cell::Class(Box::new(e))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::ClassSpec;

    fn spec(s: &str) -> ClassSpec {
        s.parse().unwrap()
    }

    #[test]
    fn round_trips() {
        for s in [
            "all",
            "RR",
            "Av(321,456123)",
            "grid([.,inc],[dec,.])",
            "grid([pt,.,.],[.,pt,.],[.,.,inc])",
            "union(L,rev(L))",
            "sumcl(Av(21))",
            "skewcl(R)",
            "fringe(2)",
            "rfringe(3)",
            "flip(grid([inc,Av(2143)]))",
        ] {
            let c = spec(s);
            assert_eq!(c.to_string(), s, "display of {s}");
            assert_eq!(spec(&c.to_string()), c, "reparse of {s}");
        }
    }

    #[test]
    fn whitespace_and_spaced_perms() {
        assert_eq!(spec(" union( L , rev( L ) ) "), spec("union(L,rev(L))"));
        assert_eq!(spec("Av( 3 2 1 , 21 )"), spec("Av(321,21)"));
        assert_eq!(
            spec("grid( [ . , inc ] , [ dec , . ] )"),
            spec("grid([.,inc],[dec,.])")
        );
    }

    #[test]
    fn rejects_malformed_input() {
        for s in [
            "",
            "nosuch",
            "Av()",
            "Av(0)",
            "Av(11)",
            "union(L)",
            "union(L,R,T)",
            "grid()",
            "grid([])",
            "grid([inc],[inc,inc])",
            "fringe()",
            "fringe(x)",
            "rev(L) trailing",
            "L)",
            "grid([foo])",
        ] {
            assert!(s.parse::<ClassSpec>().is_err(), "{s:?} should fail");
        }
    }
}
