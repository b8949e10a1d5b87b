//! Raster file formats.

mod ascii;
mod nnpr;

pub use ascii::{
    read_ascii_grid, read_ascii_grid_file, write_ascii_grid, write_ascii_grid_file, AsciiGrid,
};
pub use nnpr::{
    from_f32_raster, read_nnpr, read_nnpr_file, to_f32_raster, write_nnpr, write_nnpr_file,
    NNPR_MAGIC, NNPR_VERSION,
};
