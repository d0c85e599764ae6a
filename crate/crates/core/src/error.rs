use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pixel buffer holds {actual} values but a {width}x{height} image needs {expected}")]
    BufferSize {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("z-stack has no slices")]
    EmptyStack,

    #[error("slice {slice} is {found:?} but slice 1 is {expected:?} (width, height)")]
    SliceDimensions {
        slice: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("image dimensions differ: {left:?} vs {right:?} (width, height)")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("degenerate histogram: every pixel has intensity {value}")]
    DegenerateHistogram { value: usize },

    #[error("slice {slice}: {source}")]
    InSlice {
        slice: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("maximum projection: {source}")]
    InProjection {
        #[source]
        source: Box<Error>,
    },

    #[error("component {id} does not exist (image has {count} components)")]
    UnknownComponent { id: u32, count: u32 },

    #[error("filtration level {level} is outside 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("filtration needs at least one slice mask")]
    NoSliceMasks,

    #[error("undefined ratio: {0}")]
    UndefinedRatio(&'static str),

    #[error("connectivity must be 4 or 8, got {0}")]
    InvalidConnectivity(u32),
}

impl Error {
    pub(crate) fn in_slice(slice: usize, source: Error) -> Self {
        Error::InSlice {
            slice,
            source: Box::new(source),
        }
    }
}
