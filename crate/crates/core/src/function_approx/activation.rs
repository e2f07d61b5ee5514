use crate::scalar::Real;

/// Hidden-layer nonlinearity. Only ELU with unit scale is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Elu,
}

impl Activation {
    #[inline]
    pub fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Elu => elu(z),
        }
    }

    #[inline]
    pub fn derivative<T: Real>(self, z: T) -> T {
        match self {
            Activation::Elu => elu_derivative(z),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Elu => "elu",
        }
    }
}

/// `z` for `z >= 0`, `exp(z) - 1` otherwise.
#[inline]
pub fn elu<T: Real>(z: T) -> T {
    if z >= T::zero() {
        z
    } else {
        z.exp_m1()
    }
}

#[inline]
pub fn elu_derivative<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one()
    } else {
        z.exp()
    }
}
