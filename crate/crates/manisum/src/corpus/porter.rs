//! Porter suffix-stripping stemmer (the classic 1980 algorithm, matching the
//! author's canonical reference implementation, including its two documented
//! departures: `bli -> ble` and `logi -> log` in step 2).
//!
//! Operates on lowercase input. Words of length 1 or 2 are returned unchanged.
//! Bytes outside ASCII letters are treated as consonants and never matched by
//! any suffix rule, so digit-bearing or non-ASCII tokens pass through intact.

/// Stem a single lowercase word.
pub fn stem(word: &str) -> String {
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        k: word.len() as isize - 1,
        j: 0,
    };
    if s.k <= 1 {
        return word.to_string();
    }
    s.step1ab();
    if s.k > 0 {
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
    }
    s.b.truncate((s.k + 1) as usize);
    // Truncation points always sit at ASCII suffix boundaries, so the byte
    // prefix of a valid UTF-8 input stays valid.
    String::from_utf8(s.b).unwrap_or_else(|_| word.to_string())
}

struct Stemmer {
    b: Vec<u8>,
    /// Offset of the last live byte of the word.
    k: isize,
    /// General offset set by `ends`, marking the byte before a matched suffix.
    j: isize,
}

impl Stemmer {
    fn cons(&self, i: isize) -> bool {
        match self.b[i as usize] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.cons(i - 1)
                }
            }
            _ => true,
        }
    }

    /// Number of consonant-vowel sequences in b[0..=j] (the "measure" m).
    fn measure(&self) -> usize {
        let mut n = 0;
        let mut i = 0isize;
        loop {
            if i > self.j {
                return n;
            }
            if !self.cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i > self.j {
                    return n;
                }
                if self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > self.j {
                    return n;
                }
                if !self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.cons(i))
    }

    fn double_consonant(&self, j: isize) -> bool {
        j >= 1 && self.b[j as usize] == self.b[(j - 1) as usize] && self.cons(j)
    }

    /// consonant-vowel-consonant at i-2..=i, where the final consonant is not
    /// w, x or y; used to restore a trailing e on short stems.
    fn cvc(&self, i: isize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i as usize], b'w' | b'x' | b'y')
    }

    /// True when b[0..=k] ends with `s`; sets j to the offset before the suffix.
    fn ends(&mut self, s: &str) -> bool {
        let len = s.len() as isize;
        if len > self.k + 1 {
            return false;
        }
        let start = (self.k + 1 - len) as usize;
        if &self.b[start..=self.k as usize] != s.as_bytes() {
            return false;
        }
        self.j = self.k - len;
        true
    }

    /// Replace b[j+1..=k] with `s`, readjusting k.
    fn set_to(&mut self, s: &str) {
        for (offset, &byte) in s.as_bytes().iter().enumerate() {
            self.b[(self.j + 1) as usize + offset] = byte;
        }
        self.k = self.j + s.len() as isize;
    }

    fn replace_if_measured(&mut self, s: &str) {
        if self.measure() > 0 {
            self.set_to(s);
        }
    }

    /// Plurals and -ed / -ing.
    fn step1ab(&mut self) {
        if self.b[self.k as usize] == b's' {
            if self.ends("sses") {
                self.k -= 2;
            } else if self.ends("ies") {
                self.set_to("i");
            } else if self.b[(self.k - 1) as usize] != b's' {
                self.k -= 1;
            }
        }
        if self.ends("eed") {
            if self.measure() > 0 {
                self.k -= 1;
            }
        } else if (self.ends("ed") || self.ends("ing")) && self.vowel_in_stem() {
            self.k = self.j;
            if self.ends("at") {
                self.set_to("ate");
            } else if self.ends("bl") {
                self.set_to("ble");
            } else if self.ends("iz") {
                self.set_to("ize");
            } else if self.double_consonant(self.k) {
                self.k -= 1;
                if matches!(self.b[self.k as usize], b'l' | b's' | b'z') {
                    self.k += 1;
                }
            } else if self.measure() == 1 && self.cvc(self.k) {
                self.set_to("e");
            }
        }
    }

    /// Terminal y to i when the stem contains another vowel.
    fn step1c(&mut self) {
        if self.ends("y") && self.vowel_in_stem() {
            self.b[self.k as usize] = b'i';
        }
    }

    /// Double suffixes to single ones, when the preceding stem has m > 0.
    /// The branch layout mirrors the reference algorithm's ordered suffix
    /// dispatch; `ends` records the match offset, so arms cannot merge.
    #[allow(clippy::collapsible_match, clippy::if_same_then_else)]
    fn step2(&mut self) {
        match self.b[(self.k - 1) as usize] {
            b'a' => {
                if self.ends("ational") {
                    self.replace_if_measured("ate");
                } else if self.ends("tional") {
                    self.replace_if_measured("tion");
                }
            }
            b'c' => {
                if self.ends("enci") {
                    self.replace_if_measured("ence");
                } else if self.ends("anci") {
                    self.replace_if_measured("ance");
                }
            }
            b'e' => {
                if self.ends("izer") {
                    self.replace_if_measured("ize");
                }
            }
            b'l' => {
                if self.ends("bli") {
                    self.replace_if_measured("ble");
                } else if self.ends("alli") {
                    self.replace_if_measured("al");
                } else if self.ends("entli") {
                    self.replace_if_measured("ent");
                } else if self.ends("eli") {
                    self.replace_if_measured("e");
                } else if self.ends("ousli") {
                    self.replace_if_measured("ous");
                }
            }
            b'o' => {
                if self.ends("ization") {
                    self.replace_if_measured("ize");
                } else if self.ends("ation") {
                    self.replace_if_measured("ate");
                } else if self.ends("ator") {
                    self.replace_if_measured("ate");
                }
            }
            b's' => {
                if self.ends("alism") {
                    self.replace_if_measured("al");
                } else if self.ends("iveness") {
                    self.replace_if_measured("ive");
                } else if self.ends("fulness") {
                    self.replace_if_measured("ful");
                } else if self.ends("ousness") {
                    self.replace_if_measured("ous");
                }
            }
            b't' => {
                if self.ends("aliti") {
                    self.replace_if_measured("al");
                } else if self.ends("iviti") {
                    self.replace_if_measured("ive");
                } else if self.ends("biliti") {
                    self.replace_if_measured("ble");
                }
            }
            b'g' => {
                if self.ends("logi") {
                    self.replace_if_measured("log");
                }
            }
            _ => {}
        }
    }

    /// -ic-, -full, -ness and friends.
    #[allow(clippy::collapsible_match)]
    fn step3(&mut self) {
        match self.b[self.k as usize] {
            b'e' => {
                if self.ends("icate") {
                    self.replace_if_measured("ic");
                } else if self.ends("ative") {
                    self.replace_if_measured("");
                } else if self.ends("alize") {
                    self.replace_if_measured("al");
                }
            }
            b'i' => {
                if self.ends("iciti") {
                    self.replace_if_measured("ic");
                }
            }
            b'l' => {
                if self.ends("ical") {
                    self.replace_if_measured("ic");
                } else if self.ends("ful") {
                    self.replace_if_measured("");
                }
            }
            b's' => {
                if self.ends("ness") {
                    self.replace_if_measured("");
                }
            }
            _ => {}
        }
    }

    /// -ant, -ence and similar, dropped in context m > 1.
    fn step4(&mut self) {
        let matched = match self.b[(self.k - 1) as usize] {
            b'a' => self.ends("al"),
            b'c' => self.ends("ance") || self.ends("ence"),
            b'e' => self.ends("er"),
            b'i' => self.ends("ic"),
            b'l' => self.ends("able") || self.ends("ible"),
            b'n' => self.ends("ant") || self.ends("ement") || self.ends("ment") || self.ends("ent"),
            b'o' => {
                (self.ends("ion") && self.j >= 0 && matches!(self.b[self.j as usize], b's' | b't'))
                    || self.ends("ou")
            }
            b's' => self.ends("ism"),
            b't' => self.ends("ate") || self.ends("iti"),
            b'u' => self.ends("ous"),
            b'v' => self.ends("ive"),
            b'z' => self.ends("ize"),
            _ => false,
        };
        if matched && self.measure() > 1 {
            self.k = self.j;
        }
    }

    /// Final -e removal and -ll to -l, on long stems.
    fn step5(&mut self) {
        self.j = self.k;
        if self.b[self.k as usize] == b'e' {
            let a = self.measure();
            if a > 1 || (a == 1 && !self.cvc(self.k - 1)) {
                self.k -= 1;
            }
        }
        if self.b[self.k as usize] == b'l' && self.double_consonant(self.k) && self.measure() > 1 {
            self.k -= 1;
        }
    }
}
