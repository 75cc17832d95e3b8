use crate::Plane;

/// Bilinear sample at a fractional position, zero outside the image.
pub fn bilinear_zero(img: &Plane, x: f64, y: f64) -> f64 {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (ix, iy) = (x0 as isize, y0 as isize);
    let at = |cx: isize, cy: isize| {
        if cx < 0 || cy < 0 || cx >= w || cy >= h {
            0.0
        } else {
            img.get(cx as usize, cy as usize)
        }
    };
    let mut v = at(ix, iy) * (1.0 - fx) * (1.0 - fy);
    if fx != 0.0 {
        v += at(ix + 1, iy) * fx * (1.0 - fy);
    }
    if fy != 0.0 {
        v += at(ix, iy + 1) * (1.0 - fx) * fy;
        if fx != 0.0 {
            v += at(ix + 1, iy + 1) * fx * fy;
        }
    }
    v
}

/// Rotates by `degrees` (counter-clockwise in image coordinates with y
/// pointing down) about `(cx, cy)`; uncovered pixels are zero.
pub fn rotate_bilinear(img: &Plane, degrees: f64, cx: f64, cy: f64) -> Plane {
    if degrees == 0.0 {
        return img.clone();
    }
    let (s, c) = degrees.to_radians().sin_cos();
    Plane::from_fn(img.width(), img.height(), |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        // inverse rotation of the output coordinate
        let sx = c * dx - s * dy + cx;
        let sy = s * dx + c * dy + cy;
        bilinear_zero(img, sx, sy)
    })
}

/// Bilinear resize with edge clamping. `align_corners` follows the usual
/// tensor-library meaning: corner samples map onto corner samples.
pub fn resize_bilinear(img: &Plane, out_w: usize, out_h: usize, align_corners: bool) -> Plane {
    let (w, h) = (img.width(), img.height());
    let coord = |dst: usize, n_in: usize, n_out: usize| -> f64 {
        if align_corners {
            if n_out == 1 {
                0.0
            } else {
                dst as f64 * (n_in - 1) as f64 / (n_out - 1) as f64
            }
        } else {
            ((dst as f64 + 0.5) * n_in as f64 / n_out as f64 - 0.5).max(0.0)
        }
    };
    Plane::from_fn(out_w, out_h, |x, y| {
        let sx = coord(x, w, out_w);
        let sy = coord(y, h, out_h);
        let x0 = (sx.floor() as usize).min(w - 1);
        let y0 = (sy.floor() as usize).min(h - 1);
        let x1 = (x0 + 1).min(w - 1);
        let y1 = (y0 + 1).min(h - 1);
        let (fx, fy) = (sx - x0 as f64, sy - y0 as f64);
        let top = img.get(x0, y0) * (1.0 - fx) + img.get(x1, y0) * fx;
        let bottom = img.get(x0, y1) * (1.0 - fx) + img.get(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    })
}
