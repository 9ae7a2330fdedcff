//! Serde helpers: complex values serialize as `[re, im]` pairs in every
//! JSON artifact.

use crate::math::{C64, Mat2, Mat4};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn to_pair(v: &C64) -> [f64; 2] {
    [v.re, v.im]
}

pub fn from_pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

pub mod c64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &C64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Ok(from_pair(<[f64; 2]>::deserialize(d)?))
    }
}

pub mod c64_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|x| to_pair(&x)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(Option::<[f64; 2]>::deserialize(d)?.map(from_pair))
    }
}

pub mod mat2 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mat2, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = m
            .iter()
            .map(|row| row.iter().map(to_pair).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat2, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(d)?;
        Ok([
            [from_pair(rows[0][0]), from_pair(rows[0][1])],
            [from_pair(rows[1][0]), from_pair(rows[1][1])],
        ])
    }
}

pub mod mat3 {
    use super::*;
    pub type Mat3 = [[C64; 3]; 3];

    pub fn serialize<S: Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = m
            .iter()
            .map(|row| row.iter().map(to_pair).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat3, D::Error> {
        let rows = <[[[f64; 2]; 3]; 3]>::deserialize(d)?;
        let mut out = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = from_pair(rows[i][j]);
            }
        }
        Ok(out)
    }
}

pub mod mat4 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mat4, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = m
            .iter()
            .map(|row| row.iter().map(to_pair).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat4, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(d)?;
        let mut out = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = from_pair(rows[i][j]);
            }
        }
        Ok(out)
    }
}
