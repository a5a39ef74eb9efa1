//! Hot-spot masks as 8-bit binary PGM (P5) files named `mask_<frame>.pgm`.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use divetrack::segmask::HotSpotMask;
use image::codecs::pnm::{PnmDecoder, PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder};

use crate::output::write_atomic;

pub fn mask_file_name(frame: usize) -> String {
    format!("mask_{frame}.pgm")
}

pub fn write_mask(path: &Path, mask: &HotSpotMask) -> Result<()> {
    let bytes: Vec<u8> = mask.values().iter().map(|v| (v * 255.0).round() as u8).collect();
    write_atomic(path, |w| {
        PnmEncoder::new(w)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(&bytes, mask.width() as u32, mask.height() as u32, ExtendedColorType::L8)?;
        Ok(())
    })
}

pub fn read_mask(path: &Path, frame: usize) -> Result<HotSpotMask> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let decoder = PnmDecoder::new(BufReader::new(file)).with_context(|| format!("decoding {}", path.display()))?;
    if decoder.subtype() != PnmSubtype::Graymap(SampleEncoding::Binary) {
        bail!("{} is not a binary graymap (P5)", path.display());
    }
    let DynamicImage::ImageLuma8(img) =
        DynamicImage::from_decoder(decoder).with_context(|| format!("decoding {}", path.display()))?
    else {
        bail!("{} is not an 8-bit graymap", path.display());
    };
    let (w, h) = img.dimensions();
    let values = img.into_raw().into_iter().map(|b| f64::from(b) / 255.0).collect();
    Ok(HotSpotMask::new(frame, w as usize, h as usize, values)?)
}

/// Mask files in `dir` keyed by frame number.
pub fn list_masks(dir: &Path) -> Result<BTreeMap<usize, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if let Some(frame) = name.strip_prefix("mask_").and_then(|r| r.strip_suffix(".pgm")) {
            let frame: usize = frame.parse().with_context(|| format!("bad mask file name {name}"))?;
            if out.insert(frame, path.clone()).is_some() {
                bail!("two mask files for frame {frame}");
            }
        }
    }
    Ok(out)
}
