//! Family specification grammar.
//!
//! `normal(0,1)`, `laplace(0,1)`, `logistic(0,1)`, `uniform(-1,1)`,
//! `exp(1)`, `mixnormal(0.5,-1,1,1,1)`, `fs(normal,0.5)`,
//! `azzalini(laplace,1)`, `contam(normal,0.5,2)`.

use super::{BaseFamily, DistributionSpec};

/// Parse failure with byte position and the tokens that would have been
/// accepted there.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn found(&self) -> String {
        match self.rest().chars().next() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.pos,
            expected: expected.to_string(),
            found: self.found(),
        }
    }

    fn expect(&mut self, token: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("'{token}'")))
        }
    }

    fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let end = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .map_or(self.text.len(), |i| start + i);
        if end == start {
            return Err(self.error("family name"));
        }
        self.pos = end;
        Ok(&self.text[start..end])
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let digits_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i > digits_start && i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            i += 1;
            if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                i += 1;
            }
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i == digits_start {
            return Err(self.error("number"));
        }
        let token = &self.text[start..i];
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos = i;
                Ok(v)
            }
            _ => Err(self.error("number")),
        }
    }

    fn base_family(&mut self) -> Result<BaseFamily, ParseError> {
        self.skip_ws();
        let pos = self.pos;
        let name = self.ident().map_err(|mut e| {
            e.expected = "base family (normal, laplace or logistic)".into();
            e
        })?;
        match name {
            "normal" => Ok(BaseFamily::Normal),
            "laplace" => Ok(BaseFamily::Laplace),
            "logistic" => Ok(BaseFamily::Logistic),
            _ => Err(ParseError {
                position: pos,
                expected: "base family (normal, laplace or logistic)".into(),
                found: format!("'{name}'"),
            }),
        }
    }
}

/// Parse a family specification string.
pub fn parse_spec(text: &str) -> Result<DistributionSpec, ParseError> {
    let mut c = Cursor::new(text);
    let name_pos = {
        c.skip_ws();
        c.pos
    };
    let name = c.ident()?;
    c.expect('(')?;

    macro_rules! num {
        () => {
            c.number()?
        };
    }
    macro_rules! comma {
        () => {
            c.expect(',')?
        };
    }

    let spec = match name {
        "normal" => {
            let mu = num!();
            comma!();
            DistributionSpec::Normal { mu, sigma: num!() }
        }
        "laplace" => {
            let mu = num!();
            comma!();
            DistributionSpec::Laplace { mu, b: num!() }
        }
        "logistic" => {
            let mu = num!();
            comma!();
            DistributionSpec::Logistic { mu, s: num!() }
        }
        "uniform" => {
            let a = num!();
            comma!();
            DistributionSpec::Uniform { a, b: num!() }
        }
        "exp" => DistributionSpec::Exponential { rate: num!() },
        "mixnormal" => {
            let weight = num!();
            comma!();
            let mu1 = num!();
            comma!();
            let sigma1 = num!();
            comma!();
            let mu2 = num!();
            comma!();
            DistributionSpec::NormalMixture {
                weight,
                mu1,
                sigma1,
                mu2,
                sigma2: num!(),
            }
        }
        "fs" => {
            let base = c.base_family()?;
            comma!();
            DistributionSpec::FernandezSteel {
                base,
                theta: num!(),
            }
        }
        "azzalini" => {
            let base = c.base_family()?;
            comma!();
            DistributionSpec::Azzalini {
                base,
                theta: num!(),
            }
        }
        "contam" => {
            let base = c.base_family()?;
            comma!();
            let theta = num!();
            comma!();
            DistributionSpec::Contaminated {
                base,
                theta,
                beta: num!(),
            }
        }
        _ => return Err(ParseError {
            position: name_pos,
            expected:
                "one of normal, laplace, logistic, uniform, exp, mixnormal, fs, azzalini, contam"
                    .into(),
            found: format!("'{name}'"),
        }),
    };

    c.expect(')')?;
    c.skip_ws();
    if !c.rest().is_empty() {
        return Err(c.error("end of input"));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_grammar_examples() {
        for text in [
            "normal(0,1)",
            "laplace(0,1)",
            "logistic(0,1)",
            "uniform(-1,1)",
            "exp(1)",
            "mixnormal(0.5,-1,1,1,1)",
            "fs(normal,0.5)",
            "azzalini(laplace,1)",
            "contam(normal,0.5,2)",
            "  normal( 0 , 1 ) ",
            "normal(1e-3,2.5E2)",
        ] {
            parse_spec(text).unwrap_or_else(|e| panic!("{text}: {e}"));
        }
    }

    #[test]
    fn reports_position_and_expectation() {
        let err = parse_spec("normal(0;1)").unwrap_err();
        assert_eq!(err.position, 8);
        assert_eq!(err.expected, "','");
        assert_eq!(err.found, "';'");

        let err = parse_spec("frob(1)").unwrap_err();
        assert_eq!(err.position, 0);
        assert!(err.expected.contains("normal"));

        let err = parse_spec("fs(cauchy,1)").unwrap_err();
        assert_eq!(err.position, 3);
        assert!(err.expected.contains("base family"));

        let err = parse_spec("exp(1) trailing").unwrap_err();
        assert_eq!(err.expected, "end of input");

        let err = parse_spec("normal(0,)").unwrap_err();
        assert_eq!(err.expected, "number");
        assert_eq!(err.position, 9);
    }
}
