import { ApiClient } from "./api.js";
import { AnalystConsole } from "./console.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const app = new AnalystConsole(root, new ApiClient(""));
void app.init();
