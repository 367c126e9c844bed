import { App } from './app'

const app = new App({ baseUrl: '' })
const root = document.getElementById('app')
if (root) void app.mount(root)
