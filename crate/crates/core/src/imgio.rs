//! Raster loading and saving, channel handling, and pair registration.
//!
//! Supported on disk: 8-bit PNG (gray or RGB) and binary PGM (P5). Alpha
//! channels and 16-bit depths are rejected.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::image::{quantize, ImageBuffer, MIN_DIM};

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let reader = ImageReader::open(path)?
        .with_guessed_format()
        .map_err(Error::Io)?;
    let format = reader.format();
    if !matches!(format, Some(ImageFormat::Png) | Some(ImageFormat::Pnm)) {
        return Err(Error::UnsupportedFormat(format!(
            "{}: only PNG and PGM are supported",
            path.display()
        )));
    }
    let decoded = reader
        .decode()
        .map_err(|e| Error::UnsupportedFormat(format!("{}: {e}", path.display())))?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    if width < MIN_DIM || height < MIN_DIM {
        return Err(Error::ImageTooSmall {
            width,
            height,
            min: MIN_DIM,
        });
    }
    match decoded {
        DynamicImage::ImageLuma8(buf) => {
            let samples = buf.into_raw().into_iter().map(f64::from).collect();
            ImageBuffer::new(width, height, 1, samples)
        }
        DynamicImage::ImageRgb8(buf) if format == Some(ImageFormat::Png) => {
            let raw = buf.into_raw();
            let n = width * height;
            let mut samples = vec![0.0; 3 * n];
            for (i, px) in raw.chunks_exact(3).enumerate() {
                for (ch, &v) in px.iter().enumerate() {
                    samples[ch * n + i] = f64::from(v);
                }
            }
            ImageBuffer::new(width, height, 3, samples)
        }
        other => Err(Error::UnsupportedFormat(format!(
            "{}: color type {:?} (need 8-bit gray, or 8-bit RGB PNG)",
            path.display(),
            other.color()
        ))),
    }
}

/// Writes `img` as an 8-bit raster. The format follows the file extension:
/// `.png` for PNG, `.pgm` for binary PGM (single-channel only).
pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let bytes = interleaved_bytes(img);
    let (w, h) = (img.width() as u32, img.height() as u32);
    let color = if img.channels() == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    };
    let encode_err = |e: image::ImageError| match e {
        image::ImageError::IoError(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(other.to_string())),
    };
    match ext.as_str() {
        "png" => {
            let out = BufWriter::new(File::create(path)?);
            PngEncoder::new(out)
                .write_image(&bytes, w, h, color)
                .map_err(encode_err)
        }
        "pgm" => {
            if img.channels() != 1 {
                return Err(Error::UnsupportedFormat(
                    "PGM output requires a single-channel image".into(),
                ));
            }
            let out = BufWriter::new(File::create(path)?);
            PnmEncoder::new(out)
                .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
                .write_image(&bytes, w, h, color)
                .map_err(encode_err)
        }
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: output extension must be .png or .pgm",
            path.display()
        ))),
    }
}

fn interleaved_bytes(img: &ImageBuffer) -> Vec<u8> {
    let n = img.plane_len();
    let c = img.channels();
    let mut bytes = vec![0u8; n * c];
    for ch in 0..c {
        for (i, &s) in img.plane(ch).iter().enumerate() {
            bytes[i * c + ch] = quantize(s);
        }
    }
    bytes
}

pub fn split_channels(img: &ImageBuffer) -> Vec<ImageBuffer> {
    (0..img.channels())
        .map(|ch| {
            ImageBuffer::unclamped(img.width(), img.height(), 1, img.plane(ch).to_vec())
                .expect("plane of a valid image is valid")
        })
        .collect()
}

pub fn merge_channels(planes: &[ImageBuffer]) -> Result<ImageBuffer> {
    let first = planes
        .first()
        .ok_or_else(|| Error::InvalidImage("no planes to merge".into()))?;
    if planes
        .iter()
        .any(|p| p.channels() != 1 || p.width() != first.width() || p.height() != first.height())
    {
        return Err(Error::ShapeMismatch(
            "planes must be single-channel and equally sized".into(),
        ));
    }
    let samples = planes
        .iter()
        .flat_map(|p| p.samples().iter().copied())
        .collect();
    ImageBuffer::unclamped(first.width(), first.height(), planes.len(), samples)
}

/// Replicates a grayscale image into three identical channels.
pub fn gray_to_rgb(img: &ImageBuffer) -> Result<ImageBuffer> {
    img.require_gray()?;
    merge_channels(&[img.clone(), img.clone(), img.clone()])
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
pub fn resize_bilinear(img: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    let axis = |dst: usize, scale: f64, len: usize| {
        let pos = ((dst as f64 + 0.5) * scale - 0.5).clamp(0.0, (len - 1) as f64);
        let i0 = pos.floor() as usize;
        let i1 = (i0 + 1).min(len - 1);
        (i0, i1, pos - i0 as f64)
    };
    let cols: Vec<_> = (0..width).map(|x| axis(x, sx, img.width())).collect();
    let rows: Vec<_> = (0..height).map(|y| axis(y, sy, img.height())).collect();

    let mut samples = Vec::with_capacity(width * height * img.channels());
    for ch in 0..img.channels() {
        let plane = img.plane(ch);
        let at = |r: usize, c: usize| plane[r * img.width() + c];
        for &(r0, r1, ty) in &rows {
            for &(c0, c1, tx) in &cols {
                let top = at(r0, c0) + (at(r0, c1) - at(r0, c0)) * tx;
                let bottom = at(r1, c0) + (at(r1, c1) - at(r1, c0)) * tx;
                samples.push(top + (bottom - top) * ty);
            }
        }
    }
    ImageBuffer::unclamped(width, height, img.channels(), samples)
}

/// Brings `b` to the shape of `a`. `a` is returned unchanged; `b` is
/// resampled to `a`'s size and, when exactly one of the two is RGB, the
/// grayscale image is replicated to three channels.
pub fn register_pair(a: &ImageBuffer, b: &ImageBuffer) -> Result<(ImageBuffer, ImageBuffer)> {
    let mut a = a.clone();
    let mut b = b.clone();
    match (a.channels(), b.channels()) {
        (1, 3) => a = gray_to_rgb(&a)?,
        (3, 1) => b = gray_to_rgb(&b)?,
        _ => {}
    }
    let b = resize_bilinear(&b, a.width(), a.height())?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_rgb(w: usize, h: usize) -> ImageBuffer {
        let n = w * h;
        let mut s = vec![0.0; 3 * n];
        for i in 0..n {
            s[i] = (i % 256) as f64;
            s[n + i] = (255 - i % 256) as f64;
            s[2 * n + i] = ((i * 7) % 256) as f64;
        }
        ImageBuffer::new(w, h, 3, s).unwrap()
    }

    #[test]
    fn register_identity_for_equal_shapes() {
        let a = ImageBuffer::filled(8, 8, 1, 10.0).unwrap();
        let b = ImageBuffer::from_fn(8, 8, |r, c| (r * 8 + c) as f64).unwrap();
        let (ra, rb) = register_pair(&a, &b).unwrap();
        assert_eq!(ra, a);
        assert_eq!(rb, b);
    }

    #[test]
    fn register_resizes_constant_to_constant() {
        let a = ImageBuffer::filled(8, 8, 1, 100.0).unwrap();
        let b = ImageBuffer::filled(4, 4, 1, 50.0).unwrap();
        let (_, rb) = register_pair(&a, &b).unwrap();
        assert_eq!(rb.shape(), (8, 8, 1));
        assert!(rb.samples().iter().all(|s| (s - 50.0).abs() < 1e-9));
    }

    #[test]
    fn register_dataset_one_shape() {
        let a = ImageBuffer::filled(300, 300, 3, 1.0).unwrap();
        let b = ramp_rgb(256, 256);
        let (ra, rb) = register_pair(&a, &b).unwrap();
        assert_eq!(ra.shape(), (300, 300, 3));
        assert_eq!(rb.shape(), (300, 300, 3));
        assert!(rb.is_in_range());
    }

    #[test]
    fn register_is_idempotent() {
        let a = ramp_rgb(9, 7);
        let b = ImageBuffer::from_fn(5, 6, |r, c| (r * 30 + c * 11) as f64).unwrap();
        let (ra, rb) = register_pair(&a, &b).unwrap();
        let (ra2, rb2) = register_pair(&ra, &rb).unwrap();
        assert_eq!(ra, ra2);
        assert_eq!(rb, rb2);
        assert_eq!(rb.channels(), 3);
        assert_eq!(rb.plane(0), rb.plane(2));
    }

    #[test]
    fn split_gray_and_rgb() {
        let g = ImageBuffer::filled(4, 4, 1, 3.0).unwrap();
        let parts = split_channels(&g);
        assert_eq!(parts, vec![g.clone()]);

        let rgb = ramp_rgb(8, 8);
        let parts = split_channels(&rgb);
        assert_eq!(parts.len(), 3);
        for (ch, p) in parts.iter().enumerate() {
            assert_eq!(p.channels(), 1);
            assert_eq!(p.samples(), rgb.plane(ch));
        }
        assert_eq!(merge_channels(&parts).unwrap(), rgb);
    }

    #[test]
    fn save_quantizes_and_load_reads_back() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = vec![10.0; 16];
        s[0] = 255.7;
        s[1] = -3.2;
        s[2] = 127.5;
        let img = ImageBuffer::unclamped(4, 4, 1, s).unwrap();
        for name in ["q.png", "q.pgm"] {
            let p = dir.path().join(name);
            save_image(&img, &p).unwrap();
            let back = load_image(&p).unwrap();
            assert_eq!(&back.samples()[..3], &[255.0, 0.0, 128.0]);
        }
    }

    #[test]
    fn load_rejects_missing_and_small() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_image(dir.path().join("nope.png")),
            Err(Error::FileNotFound(_))
        ));
        let p = dir.path().join("tiny.pgm");
        std::fs::write(&p, b"P5\n2 2\n255\n\x00\xff\x00\xff").unwrap();
        assert!(matches!(load_image(&p), Err(Error::ImageTooSmall { .. })));
        let p = dir.path().join("junk.png");
        std::fs::write(&p, b"not an image at all").unwrap();
        assert!(matches!(load_image(&p), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn rgb_save_to_pgm_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = save_image(&ramp_rgb(4, 4), dir.path().join("x.pgm")).unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat(_)));
    }
}
