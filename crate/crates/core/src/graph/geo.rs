use crate::error::{Error, Result};

/// Mean Earth radius used for every great-circle distance.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance in kilometres between two points given in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64> {
    for (lat, lon) in [(lat1, lon1), (lat2, lon2)] {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::CoordinateOutOfRange { lat, lon });
        }
    }
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    Ok(2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_distances() {
        assert_eq!(haversine_km(10.0, 20.0, 10.0, 20.0).unwrap(), 0.0);
        let half = haversine_km(0.0, 0.0, 0.0, 180.0).unwrap();
        assert!((half - PI * EARTH_RADIUS_KM).abs() < 1e-9);
        assert!((half - 20015.0868).abs() < 1e-3);
        let quarter = haversine_km(0.0, 0.0, 90.0, 0.0).unwrap();
        assert!((quarter - 10007.5434).abs() < 1e-3);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(haversine_km(91.0, 0.0, 0.0, 0.0).is_err());
        assert!(haversine_km(0.0, 0.0, 0.0, -180.5).is_err());
        assert!(haversine_km(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    fn coord() -> impl Strategy<Value = (f64, f64)> {
        (-90.0..=90.0f64, -180.0..=180.0f64)
    }

    proptest! {
        #[test]
        fn symmetric_and_triangle((a, b, c) in (coord(), coord(), coord())) {
            let ab = haversine_km(a.0, a.1, b.0, b.1).unwrap();
            let ba = haversine_km(b.0, b.1, a.0, a.1).unwrap();
            let bc = haversine_km(b.0, b.1, c.0, c.1).unwrap();
            let ac = haversine_km(a.0, a.1, c.0, c.1).unwrap();
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert!(ac <= ab + bc + 1e-9);
            prop_assert!(ab <= PI * EARTH_RADIUS_KM + 1e-9);
        }
    }
}
