//! Flat `key = value` text files with `#` comments.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse(source: &str, text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(source, line, format!("expected 'key = value', found '{content}'")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::parse(source, line, "empty key"));
        }
        if out.iter().any(|e: &Entry| e.key == key) {
            return Err(Error::parse(source, line, format!("duplicate key '{key}'")));
        }
        out.push(Entry { key: key.to_string(), value: value.trim().to_string(), line });
    }
    Ok(out)
}

pub fn parse_value<T: std::str::FromStr>(source: &str, entry: &Entry) -> Result<T> {
    entry
        .value
        .parse()
        .map_err(|_| Error::parse(source, entry.line, format!("invalid value '{}' for '{}'", entry.value, entry.key)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let e = parse("t", "# header\n\na = 1 # trailing\n b=two \n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[1].value, "two");
        assert_eq!(e[1].line, 4);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse("file.cfg", "a = 1\nbroken\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse("f", "a = 1\na = 2").is_err());
    }
}
