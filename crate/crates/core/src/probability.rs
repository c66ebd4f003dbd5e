//! Exact and estimative probabilities.
//!
//! A [`Probability`] is either an exact value or a closed interval. Intervals
//! usually come from Kent's estimative vocabulary ([`PoeticWord`]), where each
//! word names a centre percentage give or take a spread.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{format_trimmed, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbabilityError {
    #[error("probability bounds [{low}, {high}] must satisfy 0 <= low <= high <= 1")]
    OutOfRange { low: f64, high: f64 },
    #[error(
        "unknown estimative word {word:?}; accepted words: {}",
        PoeticWord::accepted_list()
    )]
    UnknownWord { word: String },
}

/// The seven rows of Kent's words of estimative probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PoeticWord {
    Certainty,
    AlmostCertain,
    Probable,
    ChancesAboutEven,
    ProbablyNot,
    AlmostCertainlyNot,
    Impossibility,
}

impl PoeticWord {
    pub const ALL: [PoeticWord; 7] = [
        PoeticWord::Certainty,
        PoeticWord::AlmostCertain,
        PoeticWord::Probable,
        PoeticWord::ChancesAboutEven,
        PoeticWord::ProbablyNot,
        PoeticWord::AlmostCertainlyNot,
        PoeticWord::Impossibility,
    ];

    /// Canonical spelling, lower case with single spaces.
    pub fn as_str(self) -> &'static str {
        match self {
            PoeticWord::Certainty => "certainty",
            PoeticWord::AlmostCertain => "almost certain",
            PoeticWord::Probable => "probable",
            PoeticWord::ChancesAboutEven => "chances about even",
            PoeticWord::ProbablyNot => "probably not",
            PoeticWord::AlmostCertainlyNot => "almost certainly not",
            PoeticWord::Impossibility => "impossibility",
        }
    }

    /// Centre and spread in whole percent.
    pub fn percent(self) -> (u32, u32) {
        match self {
            PoeticWord::Certainty => (100, 0),
            PoeticWord::AlmostCertain => (93, 6),
            PoeticWord::Probable => (75, 12),
            PoeticWord::ChancesAboutEven => (50, 10),
            PoeticWord::ProbablyNot => (30, 10),
            PoeticWord::AlmostCertainlyNot => (7, 5),
            PoeticWord::Impossibility => (0, 0),
        }
    }

    /// Interval bounds `(low, high)`, clipped to `[0, 1]`.
    pub fn bounds(self) -> (f64, f64) {
        let (centre, spread) = self.percent();
        let low = centre.saturating_sub(spread);
        let high = (centre + spread).min(100);
        (f64::from(low) / 100.0, f64::from(high) / 100.0)
    }

    fn accepted_list() -> String {
        PoeticWord::ALL
            .iter()
            .map(|w| w.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn canonicalize(word: &str) -> String {
    word.split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .filter(|part| !part.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl FromStr for PoeticWord {
    type Err = ProbabilityError;

    fn from_str(word: &str) -> Result<Self, Self::Err> {
        let canonical = canonicalize(word);
        PoeticWord::ALL
            .into_iter()
            .find(|w| w.as_str() == canonical)
            .ok_or_else(|| ProbabilityError::UnknownWord {
                word: word.to_string(),
            })
    }
}

impl fmt::Display for PoeticWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilityKind {
    Exact,
    Interval,
}

/// How two probabilities are ordered when at least one is an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComparisonPolicy {
    /// Compare interval midpoints.
    #[default]
    Midpoint,
    /// Greater only when the intervals are disjoint; overlap counts as equal.
    Conservative,
}

impl FromStr for ComparisonPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "midpoint" => Ok(ComparisonPolicy::Midpoint),
            "conservative" => Ok(ComparisonPolicy::Conservative),
            other => Err(format!(
                "unknown comparison policy {other:?}; expected midpoint or conservative"
            )),
        }
    }
}

impl fmt::Display for ComparisonPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonPolicy::Midpoint => "midpoint",
            ComparisonPolicy::Conservative => "conservative",
        })
    }
}

/// A probability: an exact value or a closed sub-interval of `[0, 1]`.
///
/// A complement remembers the value it was taken from, so complementing
/// twice gives back the identical value, source word included.
#[derive(Debug, Clone, Copy)]
pub struct Probability<T> {
    kind: ProbabilityKind,
    low: T,
    high: T,
    word: Option<PoeticWord>,
    complement_of: Option<(T, T, Option<PoeticWord>)>,
}

impl<T: Scalar> Probability<T> {
    pub fn exact(value: T) -> Result<Self, ProbabilityError> {
        check_bounds(value, value)?;
        Ok(Probability {
            kind: ProbabilityKind::Exact,
            low: value,
            high: value,
            word: None,
            complement_of: None,
        })
    }

    pub fn interval(low: T, high: T) -> Result<Self, ProbabilityError> {
        check_bounds(low, high)?;
        Ok(Probability {
            kind: ProbabilityKind::Interval,
            low,
            high,
            word: None,
            complement_of: None,
        })
    }

    pub fn one() -> Self {
        Self::exact(T::one()).expect("one is a probability")
    }

    pub fn zero() -> Self {
        Self::exact(T::zero()).expect("zero is a probability")
    }

    /// Probability named by an estimative word; `certainty` and `impossibility`
    /// are exact, the other five are intervals.
    pub fn from_word(word: PoeticWord) -> Self {
        let (low, high) = word.bounds();
        let kind = if low == high {
            ProbabilityKind::Exact
        } else {
            ProbabilityKind::Interval
        };
        Probability {
            kind,
            low: T::lit(low),
            high: T::lit(high),
            word: Some(word),
            complement_of: None,
        }
    }

    pub fn from_poetic(word: &str) -> Result<Self, ProbabilityError> {
        Ok(Self::from_word(word.parse()?))
    }

    pub fn kind(&self) -> ProbabilityKind {
        self.kind
    }

    pub fn is_exact(&self) -> bool {
        self.kind == ProbabilityKind::Exact
    }

    pub fn low(&self) -> T {
        self.low
    }

    pub fn high(&self) -> T {
        self.high
    }

    /// The estimative word this value was built from, if any.
    pub fn source_word(&self) -> Option<PoeticWord> {
        self.word
    }

    pub fn midpoint(&self) -> T {
        if self.is_exact() {
            self.low()
        } else {
            (self.low() + self.high()) * T::half()
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        if self.is_exact() && other.is_exact() {
            let value = self.low() * other.low();
            Probability {
                kind: ProbabilityKind::Exact,
                low: value,
                high: value,
                word: None,
                complement_of: None,
            }
        } else {
            Probability {
                kind: ProbabilityKind::Interval,
                low: self.low() * other.low(),
                high: self.high() * other.high(),
                word: None,
                complement_of: None,
            }
        }
    }

    pub fn complement(&self) -> Self {
        match self.complement_of {
            Some((low, high, word)) => Probability {
                kind: self.kind,
                low,
                high,
                word,
                complement_of: None,
            },
            None => Probability {
                kind: self.kind,
                low: T::one() - self.high,
                high: T::one() - self.low,
                word: None,
                complement_of: Some((self.low, self.high, self.word)),
            },
        }
    }

    pub fn compare(&self, other: &Self, policy: ComparisonPolicy) -> Ordering {
        let tol = T::compare_tolerance();
        match policy {
            ComparisonPolicy::Midpoint => {
                let (a, b) = (self.midpoint(), other.midpoint());
                if (a - b).abs() <= tol {
                    Ordering::Equal
                } else if a > b {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            ComparisonPolicy::Conservative => {
                if self.low() > other.high() + tol {
                    Ordering::Greater
                } else if self.high() + tol < other.low() {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    /// Sum of probabilities of mutually exclusive outcomes, bounds clipped to `[0, 1]`.
    pub fn sum_clipped<'a, I>(values: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
        T: 'a,
    {
        let mut low = T::zero();
        let mut high = T::zero();
        let mut exact = true;
        for p in values {
            low = low + p.low();
            high = high + p.high();
            exact &= p.is_exact();
        }
        let (low, high) = (low.clamp_unit(), high.clamp_unit());
        Probability {
            kind: if exact {
                ProbabilityKind::Exact
            } else {
                ProbabilityKind::Interval
            },
            low,
            high: if exact { low } else { high },
            word: None,
            complement_of: None,
        }
    }
}

fn check_bounds<T: Scalar>(low: T, high: T) -> Result<(), ProbabilityError> {
    let ok = low >= T::zero() && low <= high && high <= T::one();
    if ok {
        Ok(())
    } else {
        Err(ProbabilityError::OutOfRange {
            low: low.to_f64().unwrap_or(f64::NAN),
            high: high.to_f64().unwrap_or(f64::NAN),
        })
    }
}

impl<T: PartialEq> PartialEq for Probability<T> {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.low == other.low
            && self.high == other.high
            && self.word == other.word
    }
}

impl<T: Scalar> fmt::Display for Probability<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            return f.write_str(&format_trimmed(self.low(), 6));
        }
        let bounds = format!(
            "[{}, {}]",
            format_trimmed(self.low(), 6),
            format_trimmed(self.high(), 6)
        );
        match self.source_word() {
            Some(word) => write!(f, "{word} {bounds}"),
            None => f.write_str(&bounds),
        }
    }
}

// Scenario-file form: a number, one of the seven words, or `{low, high}`.
impl<T: Scalar> Serialize for Probability<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if let Some(word) = self.source_word() {
            return serializer.serialize_str(word.as_str());
        }
        if self.is_exact() {
            return self.low().serialize(serializer);
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("low", &self.low())?;
        map.serialize_entry("high", &self.high())?;
        map.end()
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Probability<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ProbabilityVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Scalar> Visitor<'de> for ProbabilityVisitor<T> {
            type Value = Probability<T>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number in [0, 1], an estimative word, or {low, high}")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Self::Value, E> {
                let value = T::from_f64(v).ok_or_else(|| E::custom("number out of range"))?;
                Probability::exact(value).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                Probability::from_poetic(v).map_err(E::custom)
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut low: Option<T> = None;
                let mut high: Option<T> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "low" => low = Some(map.next_value()?),
                        "high" => high = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["low", "high"])),
                    }
                }
                let low = low.ok_or_else(|| de::Error::missing_field("low"))?;
                let high = high.ok_or_else(|| de::Error::missing_field("high"))?;
                Probability::interval(low, high).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(ProbabilityVisitor(std::marker::PhantomData))
    }
}
