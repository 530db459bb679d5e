//! JSON form of complex numbers: `{"re": .., "im": ..}`.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serializer;

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

pub mod option {
    use num_complex::Complex64;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        match z {
            Some(z) => super::serialize(z, s),
            None => s.serialize_none(),
        }
    }
}
