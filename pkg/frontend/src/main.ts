// Browser entry point; the bundle is served from the same origin as the API.
import { startApp } from "./app";

const root = document.getElementById("app");
if (root) startApp(root);
