//! Browser demo. The native [`demo`] module does the work; on wasm32 the
//! [`DemoSession`] class exposes it to JavaScript as JSON strings.

pub mod demo;

#[cfg(target_arch = "wasm32")]
mod wasm {
    use serde::Serialize;
    use wasm_bindgen::prelude::*;

    use crate::demo::Session;

    fn to_js<T: Serialize>(r: coxstab::Result<T>) -> Result<String, JsValue> {
        let v = r.map_err(|e| JsValue::from_str(&e.to_string()))?;
        serde_json::to_string(&v).map_err(|e| JsValue::from_str(&e.to_string()))
    }

    #[wasm_bindgen]
    pub struct DemoSession {
        inner: Session,
    }

    #[wasm_bindgen]
    impl DemoSession {
        #[wasm_bindgen(constructor)]
        pub fn new(n: usize, within_corr: f64, seed: u32) -> Result<DemoSession, JsValue> {
            Session::new(n, within_corr, seed as u64)
                .map(|inner| DemoSession { inner })
                .map_err(|e| JsValue::from_str(&e.to_string()))
        }

        pub fn dataset(&self) -> Result<String, JsValue> {
            to_js(Ok(self.inner.dataset()))
        }

        pub fn fit(&self, alpha: f64, beta: f64) -> Result<String, JsValue> {
            to_js(self.inner.fit(alpha, beta))
        }

        pub fn path(&self, beta: f64, alpha_min: f64, alpha_max: f64, steps: usize) -> Result<String, JsValue> {
            to_js(self.inner.path(beta, alpha_min, alpha_max, steps))
        }

        pub fn stability(&self, alpha: f64, beta: f64, replicates: usize, seed: u32) -> Result<String, JsValue> {
            to_js(self.inner.stability(alpha, beta, replicates, seed as u64))
        }
    }
}
