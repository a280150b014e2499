//! Contact temperature, the measured trace of a buried sensor, and the object
//! temperature at which pine and aluminum feel the same.
//!
//! `cargo run --example contact_and_ambiguity`

use thermoscope::ambiguity::{ambiguous_object_temperature, double_condition_gap, verify_ambiguity};
use thermoscope::heatcore::{ALUMINUM, PINE_WOOD, ROBOT_SENSOR};
use thermoscope::{
    contact_temperature, effusivity_from_properties, measured_temperature, AmbiguityQuery, BodyState,
    DoubleConditionQuery, MaterialCatalog, SensorSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Effusivity from conductivity, density and heat capacity.
    let e = effusivity_from_properties(0.12, 500.0, 1800.0)?;
    println!("pine-like wood from properties: e = {e:.1} W s^0.5 / m^2 K");

    let catalog = MaterialCatalog::presets();
    let sensor_body = BodyState::new(catalog.require(ROBOT_SENSOR)?.clone(), 29.5)?;
    let pine = BodyState::new(catalog.require(PINE_WOOD)?.clone(), 22.5)?;
    let aluminum = BodyState::new(catalog.require(ALUMINUM)?.clone(), 22.5)?;
    let sensor = SensorSpec::with_defaults(sensor_body.clone(), true)?;

    for object in [&pine, &aluminum] {
        let tc = contact_temperature(&sensor_body, object)?.contact_temperature;
        print!("{:>9}: contact {tc:.3} °C, measured", object.material.name);
        for t in [0.1, 0.5, 1.0, 5.0] {
            print!("  {t:.1}s={:.3}", measured_temperature(&sensor, object, t)?);
        }
        println!();
    }

    let t2 = ambiguous_object_temperature(&AmbiguityQuery {
        sensor: sensor_body.clone(),
        object1: pine.clone(),
        target_effusivity: aluminum.effusivity(),
    })?;
    let cold_aluminum = aluminum.with_temperature(t2)?;
    let residual = verify_ambiguity(&sensor, &pine, &cold_aluminum, 5.0, 500)?;
    println!("aluminum at {t2:.4} °C matches pine at 22.5 °C (max trace difference {residual:.2e} °C)");

    // An unheated second sensor at ambient breaks the tie.
    let passive = sensor_body.with_temperature(22.5)?;
    let gap = double_condition_gap(&DoubleConditionQuery {
        sensor1: sensor_body,
        sensor2: passive,
        object1: pine,
        target_effusivity: aluminum.effusivity(),
    })?;
    println!(
        "two sensors: ambiguous temperatures {:.4} and {:.4} °C, gap {:.4} °C",
        gap.first, gap.second, gap.gap
    );
    Ok(())
}
