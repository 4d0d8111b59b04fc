use super::{ImageBuffer, ImageError};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedHeader(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("digits are ASCII")
            .parse()
            .map_err(|_| ImageError::MalformedHeader(format!("{what} out of range")))
    }
}

/// Parses a P2, P3, P5 or P6 image.
pub fn decode(bytes: &[u8]) -> Result<ImageBuffer, ImageError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(ImageError::MalformedHeader("missing P magic number".into()));
    }
    let (channels, binary) = match bytes[1] {
        b'2' => (1, false),
        b'3' => (3, false),
        b'5' => (1, true),
        b'6' => (3, true),
        other => return Err(ImageError::MalformedHeader(format!("unsupported format P{}", other as char))),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!("empty {width}x{height} image")));
    }
    let expected = width * height * channels;
    let samples = if binary {
        // exactly one whitespace byte separates the header from the raster
        if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(ImageError::MalformedHeader("missing whitespace after maxval".into()));
        }
        let raster = &bytes[cur.pos + 1..];
        if raster.len() < expected {
            return Err(ImageError::Truncated { expected, found: raster.len() });
        }
        raster[..expected].to_vec()
    } else {
        let mut samples = Vec::with_capacity(expected);
        for _ in 0..expected {
            cur.skip_blank();
            if cur.pos >= bytes.len() {
                return Err(ImageError::Truncated { expected, found: samples.len() });
            }
            let v = cur.number("sample")?;
            if v > 255 {
                return Err(ImageError::MalformedHeader(format!("sample {v} exceeds maxval")));
            }
            samples.push(v as u8);
        }
        samples
    };
    ImageBuffer::new(width, height, channels, samples)
}

/// Binary encoding: P5 for grayscale, P6 for RGB.
pub fn encode(image: &ImageBuffer) -> Vec<u8> {
    let magic = if image.channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.samples);
    out
}
