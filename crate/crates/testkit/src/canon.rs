//! Whitespace canonicalization used by the golden comparisons.

const KEYWORDS: [&str; 10] = ["SELECT", "DISTINCT", "FROM", "WHERE", "AND", "OR", "NOT", "AS", "UNION", "ALL"];

/// Collapses whitespace, drops spaces next to `(`, `)` and `,`, and
/// uppercases SQL keywords. Quoted text is left alone.
pub fn sql(text: &str) -> String {
    let mut tokens: Vec<String> = Vec::new();
    let mut chars = text.chars().peekable();
    let mut word = String::new();
    let flush = |word: &mut String, tokens: &mut Vec<String>| {
        if !word.is_empty() {
            let upper = word.to_ascii_uppercase();
            tokens.push(if KEYWORDS.contains(&upper.as_str()) { upper } else { word.clone() });
            word.clear();
        }
    };
    while let Some(c) = chars.next() {
        match c {
            '\'' => {
                flush(&mut word, &mut tokens);
                let mut lit = String::from('\'');
                while let Some(d) = chars.next() {
                    lit.push(d);
                    if d == '\'' {
                        if chars.peek() == Some(&'\'') {
                            lit.push(chars.next().expect("peeked"));
                        } else {
                            break;
                        }
                    }
                }
                tokens.push(lit);
            }
            c if c.is_whitespace() => flush(&mut word, &mut tokens),
            '(' | ')' | ',' => {
                flush(&mut word, &mut tokens);
                tokens.push(c.to_string());
            }
            c => word.push(c),
        }
    }
    flush(&mut word, &mut tokens);

    let punct = |t: &str| matches!(t, "(" | ")" | ",");
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 && !punct(t) && !punct(&tokens[i - 1]) {
            out.push(' ');
        }
        out.push_str(t);
    }
    out
}

/// Removes whitespace outside string literals; for shell-syntax documents.
pub fn mongo(text: &str) -> String {
    let mut out = String::new();
    let mut in_str = false;
    let mut escaped = false;
    for c in text.chars() {
        if in_str {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_str = false;
            }
        } else if c == '"' {
            in_str = true;
            out.push(c);
        } else if !c.is_whitespace() {
            out.push(c);
        }
    }
    out
}
